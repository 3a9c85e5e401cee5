//! Replaying a recorded run through a projective map.
//!
//! A projective map preserves every incidence between points and lines, so a
//! straightedge-only trace copies over verbatim. Compass steps and ordering
//! tests need not survive: the image of a circle can be a circle again while
//! the image of its center is not its center. The replay walks the trace and
//! reports the first event that does not transfer.

use std::collections::HashMap;

use serde::Serialize;

use super::interp::{eval_test, Event, Trace};
use crate::geom::{self, GeomObject, ProjectiveMap};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Breakpoint {
    /// A recorded test evaluates differently on the mapped objects.
    TestFlipped {
        event: usize,
        test: String,
        recorded: bool,
        mapped: bool,
    },
    /// Repeating the compass step on the mapped points does not give the image
    /// of the recorded circle.
    CompassStep { event: usize, name: String, step: String },
    /// An object has no image of the same kind (a point sent to infinity, or
    /// a circle sent to a non-circular conic) before any other breakpoint.
    Unmappable { event: usize, name: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransferReport {
    pub events: usize,
    /// Point-on-line facts recorded by the trace and checked on the images.
    pub incidences_checked: usize,
    pub incidences_preserved: usize,
    pub breakpoint: Option<Breakpoint>,
}

impl TransferReport {
    pub fn incidences_hold(&self) -> bool {
        self.incidences_checked == self.incidences_preserved
    }
}

pub fn projective_replay(trace: &Trace, t: &ProjectiveMap) -> TransferReport {
    let mut recorded: HashMap<String, GeomObject> = HashMap::new();
    let mut mapped: HashMap<String, GeomObject> = HashMap::new();
    let mut report = TransferReport {
        events: trace.events.len(),
        incidences_checked: 0,
        incidences_preserved: 0,
        breakpoint: None,
    };
    let first = |report: &mut TransferReport, b: Breakpoint| {
        if report.breakpoint.is_none() {
            report.breakpoint = Some(b);
        }
    };

    for (i, e) in trace.events.iter().enumerate() {
        match e {
            Event::Bind {
                name,
                object,
                step,
                parents,
            } => {
                let image = t.apply(object);
                if step.starts_with("circle(") {
                    let pts: Option<Vec<_>> = parents
                        .iter()
                        .map(|n| mapped.get(n).and_then(|o| o.as_point()).cloned())
                        .collect();
                    let again = pts.and_then(|p| geom::circle_centered(&p[0], &p[1], &p[2]).ok());
                    match (&image, again) {
                        (Some(GeomObject::Circle(img)), Some(c)) if *img == c => {}
                        _ => first(
                            &mut report,
                            Breakpoint::CompassStep {
                                event: i,
                                name: name.clone(),
                                step: step.clone(),
                            },
                        ),
                    }
                }
                // incidences with the lines this object came from
                let lines: Vec<&String> = parents
                    .iter()
                    .filter(|n| recorded.get(*n).is_some_and(|o| o.as_line().is_some()))
                    .collect();
                let pairs: Vec<(&String, &String)> = match object {
                    GeomObject::Point(_) => lines.iter().map(|l| (name, *l)).collect(),
                    GeomObject::Line(_) => parents.iter().map(|p| (p, name)).collect(),
                    GeomObject::Circle(_) => vec![],
                };
                match &image {
                    Some(img) => {
                        mapped.insert(name.clone(), img.clone());
                    }
                    None => {
                        mapped.remove(name);
                        if !matches!(object, GeomObject::Circle(_)) || step == "input" {
                            first(
                                &mut report,
                                Breakpoint::Unmappable {
                                    event: i,
                                    name: name.clone(),
                                },
                            );
                        }
                    }
                }
                for (p, l) in pairs {
                    if let (Some(GeomObject::Point(mp)), Some(ml)) = (mapped.get(p), mapped.get(l)) {
                        report.incidences_checked += 1;
                        if geom::on(mp, ml) {
                            report.incidences_preserved += 1;
                        }
                    }
                }
                recorded.insert(name.clone(), object.clone());
            }
            Event::Test { test, outcome, expr } => {
                if let Ok(now) = eval_test(expr, &mapped) {
                    if now != *outcome {
                        first(
                            &mut report,
                            Breakpoint::TestFlipped {
                                event: i,
                                test: test.clone(),
                                recorded: *outcome,
                                mapped: now,
                            },
                        );
                    }
                }
            }
            Event::Choose { .. } | Event::Oracle { .. } => {}
        }
    }
    report
}
