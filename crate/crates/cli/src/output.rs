//! Text, CSV and JSON renderings of library reports.

use loopfire::bn::{BnRankBounds, DimProbe, ScanReport, VerifyReport};
use loopfire::burn::UnburntPiece;
use loopfire::{
    BurnReport, CactusGraph, Divisor, DivisorClass, LoopId, PointRef, RankWitness, Rational,
};
use serde_json::{json, Map, Value};

/// Version of every JSON document this tool writes.
pub const SCHEMA: u64 = 1;

pub fn document(kind: &str, body: Value) -> String {
    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("kind".into(), json!(kind));
    if let Value::Object(b) = body {
        m.extend(b);
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("json values serialize");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

fn point(g: &CactusGraph, p: &PointRef) -> String {
    g.fmt_point(p)
}

fn mu_map(g: &CactusGraph, cls: &DivisorClass) -> Value {
    let mut m = Map::new();
    for l in g.loop_ids() {
        m.insert(g.name(l).to_string(), json!(cls.mu[l.0].to_string()));
    }
    Value::Object(m)
}

fn chips_json(d: &Divisor) -> Value {
    let g = d.graph();
    Value::Array(
        d.chips()
            .iter()
            .map(|(p, m)| json!({"loop": g.name(p.loop_id), "offset": p.offset.to_string(), "mult": m}))
            .collect(),
    )
}

pub fn info_text(g: &CactusGraph) -> String {
    let s = g.graph_stats();
    let mut out = format!(
        "genus={}\nlongest_loop_path={}\nbase_point={}\n",
        s.genus,
        s.longest_loop_path,
        point(g, g.base_point())
    );
    for l in g.loop_ids() {
        let parent = g
            .parent(l)
            .map(|p| g.name(p).to_string())
            .unwrap_or_else(|| "-".into());
        let at = g
            .attach_offset(l)
            .map(|o| o.to_string())
            .unwrap_or_else(|| "-".into());
        out.push_str(&format!(
            "loop {} circumference={} parent={parent} attach={at}\n",
            g.name(l),
            g.circumference(l)
        ));
    }
    for (w, v) in &s.wedge_valences {
        out.push_str(&format!("wedge {w} valence={v}\n"));
    }
    out
}

pub fn info_json(g: &CactusGraph) -> String {
    let s = g.graph_stats();
    let loops: Vec<Value> = g
        .loop_ids()
        .map(|l| {
            json!({
                "name": g.name(l),
                "circumference": g.circumference(l).to_string(),
                "parent": g.parent(l).map(|p| g.name(p).to_string()),
                "attach_offset": g.attach_offset(l).map(|o| o.to_string()),
            })
        })
        .collect();
    document(
        "info",
        json!({
            "genus": s.genus,
            "longest_loop_path": s.longest_loop_path,
            "base_point": point(g, g.base_point()),
            "loops": loops,
            "wedge_valences": s.wedge_valences,
        }),
    )
}

pub fn reduced_text(d: &Divisor, cls: &DivisorClass) -> String {
    let g = d.graph();
    let mut out = format!("# degree {}\n", cls.degree);
    for l in g.loop_ids() {
        out.push_str(&format!("# mu_{} {}\n", g.name(l), cls.mu[l.0]));
    }
    out.push_str(&d.to_text());
    out
}

pub fn reduced_json(d: &Divisor, cls: &DivisorClass, base: &PointRef) -> String {
    let g = d.graph();
    document(
        "reduce",
        json!({
            "base": point(g, base),
            "degree": cls.degree,
            "mu": mu_map(g, cls),
            "chips": chips_json(d),
        }),
    )
}

fn piece_text(g: &CactusGraph, p: &UnburntPiece) -> String {
    match p {
        UnburntPiece::Arc {
            loop_id,
            start,
            end,
        } => format!("arc {} [{start}, {end}]", g.name(*loop_id)),
        UnburntPiece::Point { point } => format!("point {point}"),
    }
}

fn burn_rows(g: &CactusGraph, r: &BurnReport) -> Vec<Vec<String>> {
    r.vertices
        .iter()
        .map(|v| {
            vec![
                point(g, &v.point),
                v.chips.to_string(),
                v.arriving.to_string(),
                u8::from(v.burnt).to_string(),
            ]
        })
        .collect()
}

pub fn burn_csv(g: &CactusGraph, r: &BurnReport) -> String {
    csv_text(
        &["point", "chips", "arriving_directions", "burnt"],
        burn_rows(g, r),
    )
}

pub fn burn_text(g: &CactusGraph, r: &BurnReport) -> String {
    let mut out = format!("fully_burnt={}\n", r.fully_burnt);
    for p in &r.unburnt_set {
        out.push_str(&format!("unburnt {}\n", piece_text(g, p)));
    }
    for (p, (chips, arriving)) in &r.blocking_points {
        out.push_str(&format!(
            "blocking {} chips={chips} arriving={arriving}\n",
            point(g, p)
        ));
    }
    for row in burn_rows(g, r) {
        out.push_str(&format!(
            "vertex {} chips={} arriving={} burnt={}\n",
            row[0], row[1], row[2], row[3]
        ));
    }
    out
}

pub fn burn_json(g: &CactusGraph, r: &BurnReport) -> String {
    let unburnt: Vec<Value> = r
        .unburnt_set
        .iter()
        .map(|p| match p {
            UnburntPiece::Arc { loop_id, start, end } => {
                json!({"kind": "arc", "loop": g.name(*loop_id), "start": start.to_string(), "end": end.to_string()})
            }
            UnburntPiece::Point { point } => json!({"kind": "point", "point": point}),
        })
        .collect();
    let vertices: Vec<Value> = r
        .vertices
        .iter()
        .map(|v| json!({"point": point(g, &v.point), "chips": v.chips, "arriving_directions": v.arriving, "burnt": v.burnt}))
        .collect();
    document(
        "burn",
        json!({"fully_burnt": r.fully_burnt, "unburnt_set": unburnt, "vertices": vertices}),
    )
}

fn sequence_divisor(g: &std::sync::Arc<CactusGraph>, seq: &[PointRef]) -> Divisor {
    Divisor::from_chips(g, seq.iter().map(|p| (p.clone(), 1)))
}

pub fn rank_text(g: &std::sync::Arc<CactusGraph>, w: &RankWitness, witness: bool) -> String {
    let mut out = format!("rank={}\n", w.rank);
    if w.lower_bound_only {
        out.push_str("# lower bound only: search stopped at max-r\n");
    }
    if witness {
        match &w.refuting_sequence {
            Some(seq) => {
                out.push_str("# refuting sequence\n");
                out.push_str(&sequence_divisor(g, seq).to_text());
            }
            None => out.push_str("# no refuting sequence: rank equals the search cap\n"),
        }
    }
    out
}

pub fn rank_json(g: &CactusGraph, w: &RankWitness) -> String {
    let seq = w
        .refuting_sequence
        .as_ref()
        .map(|s| s.iter().map(|p| point(g, p)).collect::<Vec<_>>());
    document(
        "rank",
        json!({
            "rank": w.rank,
            "lower_bound_only": w.lower_bound_only,
            "refuting_sequence": seq,
            "candidate_log": w.candidate_log,
        }),
    )
}

pub fn class_json(g: &CactusGraph, cls: &DivisorClass) -> String {
    document("class", json!({"degree": cls.degree, "mu": mu_map(g, cls)}))
}

pub fn divisor_json(kind: &str, d: &Divisor) -> String {
    document(kind, json!({"degree": d.degree(), "chips": chips_json(d)}))
}

fn grid_label(g: &CactusGraph, s: &loopfire::bn::Stratum, coords: &[usize], n: usize) -> String {
    coords
        .iter()
        .enumerate()
        .map(|(axis, &j)| format!("{}={}", g.name(s.free_loops[axis]), s.offset(g, axis, j, n)))
        .collect::<Vec<_>>()
        .join(";")
}

pub fn scan_csv(g: &CactusGraph, rep: &ScanReport) -> String {
    let mut rows = Vec::new();
    for s in &rep.strata {
        for p in &s.points {
            rows.push(vec![
                s.id.to_string(),
                s.pattern.clone(),
                s.coord_names.join(";"),
                grid_label(g, s, &p.coords, rep.n),
                if p.marked {
                    format!(">={}", rep.r)
                } else {
                    format!("<{}", rep.r)
                },
                u8::from(p.marked).to_string(),
            ]);
        }
    }
    csv_text(
        &[
            "stratum_id",
            "pattern",
            "coord_names",
            "grid_point",
            "rank",
            "marked",
        ],
        rows,
    )
}

pub fn scan_text(rep: &ScanReport) -> String {
    let mut out = format!(
        "r={}\nd={}\nN={}\nstrata={}\nfound_positive_dimensional={}\n",
        rep.r,
        rep.d,
        rep.n,
        rep.strata.len(),
        rep.found_positive_dimensional
    );
    for s in &rep.strata {
        let marked = s.points.iter().filter(|p| p.marked).count();
        if marked > 0 {
            out.push_str(&format!(
                "stratum {} [{}]: {marked}/{} marked, longest run {}\n",
                s.id,
                s.pattern,
                s.points.len(),
                s.max_run()
            ));
        }
    }
    out
}

pub fn scan_json(rep: &ScanReport) -> String {
    let strata: Vec<Value> = rep
        .strata
        .iter()
        .map(|s| {
            json!({
                "id": s.id,
                "pattern": s.pattern,
                "coord_names": s.coord_names,
                "marked": s.points.iter().filter(|p| p.marked).map(|p| &p.coords).collect::<Vec<_>>(),
                "points": s.points.len(),
                "runs": s.runs,
            })
        })
        .collect();
    document(
        "scan",
        json!({
            "r": rep.r,
            "d": rep.d,
            "n": rep.n,
            "found_positive_dimensional": rep.found_positive_dimensional,
            "strata": strata,
        }),
    )
}

fn names(g: &CactusGraph, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| g.name(LoopId(i)).to_string()).collect()
}

fn probe_rows(p: &DimProbe) -> Vec<Vec<String>> {
    p.trials
        .iter()
        .map(|t| {
            vec![
                t.directions.join(";"),
                Rational::new(1, t.magnitude).to_string(),
                u8::from(t.persisted).to_string(),
            ]
        })
        .collect()
}

pub fn probe_csv(p: &DimProbe) -> String {
    csv_text(
        &["direction_subset", "magnitude", "persisted"],
        probe_rows(p),
    )
}

pub fn probe_text(g: &CactusGraph, p: &DimProbe) -> String {
    let mut out = format!(
        "r={}\nestimated_local_dim={}\npersistent_directions={}\n",
        p.r,
        p.estimated_local_dim,
        names(g, &p.persistent_directions).join(";")
    );
    for row in probe_rows(p) {
        out.push_str(&format!(
            "trial {} magnitude={} persisted={}\n",
            row[0], row[1], row[2]
        ));
    }
    out
}

pub fn probe_json(g: &CactusGraph, p: &DimProbe) -> String {
    document(
        "probe",
        json!({
            "r": p.r,
            "base_degree": p.base_class.degree,
            "base_mu": mu_map(g, &p.base_class),
            "estimated_local_dim": p.estimated_local_dim,
            "persistent_directions": names(g, &p.persistent_directions),
            "persistent_subsets": p.persistent_subsets.iter().map(|s| names(g, s)).collect::<Vec<_>>(),
            "trials": p.trials,
        }),
    )
}

pub fn bounds_text(b: &BnRankBounds) -> String {
    let mut out = format!(
        "r={}\nd={}\nlower={}\nupper={}\nupper_source={}\nwidened={}\nrank_checks={}\n",
        b.r,
        b.d,
        b.lower,
        b.upper,
        b.upper_source.as_str(),
        b.widened,
        b.checks
    );
    if let Some(e) = &b.counterexample {
        out.push_str("# uncovered adversary\n");
        out.push_str(&e.to_text());
    }
    out
}

pub fn bounds_json(b: &BnRankBounds) -> String {
    document(
        "wrd",
        json!({
            "r": b.r,
            "d": b.d,
            "lower": b.lower,
            "upper": b.upper,
            "upper_source": b.upper_source.as_str(),
            "widened": b.widened,
            "rank_checks": b.checks,
            "counterexample": b.counterexample.as_ref().map(chips_json),
        }),
    )
}

pub fn verify_json(r: &VerifyReport) -> String {
    document(
        "verify",
        json!({
            "name": r.name,
            "passed": r.passed,
            "verdict": r.verdict,
            "facts": r.facts,
            "checks": r.checks,
        }),
    )
}
