use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::stage::RestorationStage;

/// One element of one microgrid at one stage. Powers in pu, `u_*` are
/// squared voltage magnitudes; cells that do not apply are empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRow {
    pub stage: usize,
    pub mg_id: usize,
    pub kind: String,
    pub id: String,
    pub status: u8,
    pub p_a: Option<f64>,
    pub p_b: Option<f64>,
    pub p_c: Option<f64>,
    pub q_a: Option<f64>,
    pub q_b: Option<f64>,
    pub q_c: Option<f64>,
    pub u_a: Option<f64>,
    pub u_b: Option<f64>,
    pub u_c: Option<f64>,
}

impl StageRow {
    fn new(st: &RestorationStage, kind: &str, id: String, on: bool) -> Self {
        StageRow {
            stage: st.stage,
            mg_id: st.microgrid,
            kind: kind.into(),
            id,
            status: on as u8,
            p_a: None,
            p_b: None,
            p_c: None,
            q_a: None,
            q_b: None,
            q_c: None,
            u_a: None,
            u_b: None,
            u_c: None,
        }
    }

    fn with_pq(mut self, p: Option<&[f64; 3]>, q: Option<&[f64; 3]>) -> Self {
        if let Some(p) = p {
            (self.p_a, self.p_b, self.p_c) = (Some(p[0]), Some(p[1]), Some(p[2]));
        }
        if let Some(q) = q {
            (self.q_a, self.q_b, self.q_c) = (Some(q[0]), Some(q[1]), Some(q[2]));
        }
        self
    }
}

pub fn stage_rows(st: &RestorationStage) -> Vec<StageRow> {
    let mut rows = Vec::new();
    for (&b, &on) in &st.status.buses {
        let mut r = StageRow::new(st, "bus", b.to_string(), on);
        if let Some(u) = st.voltage.get(&b) {
            (r.u_a, r.u_b, r.u_c) = (Some(u[0]), Some(u[1]), Some(u[2]));
        }
        rows.push(r);
    }
    for (&b, &on) in &st.blocks {
        rows.push(StageRow::new(st, "block", b.to_string(), on));
    }
    for (id, &on) in &st.status.lines {
        rows.push(StageRow::new(st, "line", id.clone(), on).with_pq(st.line_p.get(id), st.line_q.get(id)));
    }
    for (id, &on) in &st.status.loads {
        rows.push(StageRow::new(st, "load", id.clone(), on));
    }
    for (id, &on) in &st.status.generators {
        rows.push(StageRow::new(st, "generator", id.clone(), on).with_pq(st.gen_p.get(id), st.gen_q.get(id)));
    }
    rows
}

pub fn write_stage_csv<W: Write>(stages: &[RestorationStage], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for st in stages {
        for r in stage_rows(st) {
            w.serialize(r)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_rows<W: Write>(rows: &[StageRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_stage_csv<R: Read>(input: R) -> csv::Result<Vec<StageRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}
