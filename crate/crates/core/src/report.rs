//! The full analysis of a generator matrix as one serializable document.
//!
//! Vectors are given in the input coordinates, faces by their sorted
//! extreme ray indices (canonical ray order) together with the 0-based
//! generator columns lying on them. Every array is in a fixed order, so the
//! JSON rendering does not depend on the number of worker threads.
//! Windows are read in internal lattice coordinates, which are the input
//! coordinates whenever the generators span `Z^d`.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use serde::Serialize;

use crate::classify::{classify_all, minimal_q_crosscheck, nowhere_witness, CrossCheckReport, DimStatusCount, NowhereWitness, SaturationReport};
use crate::cone::{enumerate_faces, Cone, Face, FacePoset};
use crate::error::{Error, Result};
use crate::exactla::{IntMat, IntVec};
use crate::hilbert::{hilbert_basis, HilbertBasis};
use crate::pairtype::{pair_type_of_columns, PairType};
use crate::semigroup::{box_volume, FundamentalHoleSet, Semigroup, Window, WindowedSets};

#[derive(Clone, Debug)]
pub struct ReportOptions {
    pub face_budget: usize,
    pub point_budget: u64,
    pub window: Option<Window>,
    /// Tally the minimal almost saturated 2-faces by cell-pair type (only
    /// meaningful for the 16 columns of the 2x2x2x2 table design).
    pub pair_types: bool,
    /// Include wall-clock timings; off by default since they break
    /// byte-identical output.
    pub timing: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            face_budget: crate::cone::DEFAULT_FACE_BUDGET,
            point_budget: crate::semigroup::DEFAULT_POINT_BUDGET,
            window: None,
            pair_types: false,
            timing: false,
        }
    }
}

/// Everything computed for one generator matrix.
pub struct Analysis {
    pub sg: Semigroup,
    pub poset: FacePoset,
    pub basis: HilbertBasis,
    pub report: SaturationReport,
    pub timings: Vec<(&'static str, f64)>,
}

impl Analysis {
    pub fn run(a: &IntMat, face_budget: usize) -> Result<Analysis> {
        let mut timings = Vec::new();
        let mut clock = Instant::now();
        let mut lap = |name: &'static str, timings: &mut Vec<(&'static str, f64)>| {
            timings.push((name, clock.elapsed().as_secs_f64()));
            clock = Instant::now();
        };
        let sg = Semigroup::from_generators(a)?;
        lap("cone", &mut timings);
        let poset = enumerate_faces(sg.cone(), face_budget)?;
        lap("faces", &mut timings);
        let basis = hilbert_basis(sg.cone());
        lap("hilbert", &mut timings);
        let report = classify_all(&sg, &poset, &basis);
        lap("classify", &mut timings);
        Ok(Analysis {
            sg,
            poset,
            basis,
            report,
            timings,
        })
    }

    pub fn cone(&self) -> &Cone {
        self.sg.cone()
    }

    pub fn face_ref(&self, face: &Face) -> FaceRef {
        FaceRef {
            rays: face.ray_set.clone(),
            generators: face.gen_idx.clone(),
            dim: face.dim,
        }
    }

    fn original(&self, x: &IntVec) -> IntVec {
        self.cone().transform().to_original(x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct FaceRef {
    pub rays: Vec<usize>,
    pub generators: Vec<usize>,
    pub dim: usize,
}

#[derive(Debug, Serialize)]
pub struct InputEcho {
    pub source: String,
    pub rows: usize,
    pub cols: usize,
    pub matrix: Vec<IntVec>,
}

#[derive(Debug, Serialize)]
pub struct ConeSummary {
    pub ambient_dim: usize,
    pub dim: usize,
    /// Index of the generated lattice in its saturation.
    pub lattice_index: String,
    pub extreme_rays: Vec<IntVec>,
    pub ray_generators: Vec<Vec<usize>>,
    pub facets: Vec<IntVec>,
    pub face_counts: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct HoleSummary {
    pub computed: bool,
    /// Lattice points of the zonotope bounding box.
    pub box_points: String,
    pub holes: Vec<IntVec>,
    pub reason: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct Certificate {
    pub face: FaceRef,
    /// Hilbert basis element whose face system is infeasible.
    pub b: IntVec,
}

#[derive(Debug, Serialize)]
pub struct ClassificationSummary {
    pub per_dim: Vec<DimStatusCount>,
    pub minimal_almost: Vec<FaceRef>,
    pub maximal_nowhere: Vec<FaceRef>,
    /// One infeasible Hilbert basis element per nowhere saturated face.
    pub certificates: Vec<Certificate>,
}

#[derive(Debug, Serialize)]
pub struct WitnessEntry {
    pub face: FaceRef,
    pub witness: Option<NowhereWitness>,
    pub reason: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct WindowSummary {
    pub sets: WindowedSets,
    pub crosscheck: CrossCheckReport,
    pub nowhere_witnesses: Vec<WitnessEntry>,
}

#[derive(Debug, Serialize)]
pub struct ReportDocument {
    pub input: InputEcho,
    pub cone: ConeSummary,
    pub hilbert_basis: Vec<IntVec>,
    pub fundamental_holes: HoleSummary,
    pub classification: ClassificationSummary,
    pub window: Option<WindowSummary>,
    pub pair_types: Option<BTreeMap<PairType, usize>>,
    pub timing: Option<BTreeMap<&'static str, f64>>,
}

impl ReportDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs the whole pipeline and assembles the document.
pub fn build_report(source: &str, a: &IntMat, opts: &ReportOptions) -> Result<ReportDocument> {
    let analysis = Analysis::run(a, opts.face_budget)?;
    report_from_analysis(source, &analysis, opts)
}

pub fn report_from_analysis(source: &str, an: &Analysis, opts: &ReportOptions) -> Result<ReportDocument> {
    let started = Instant::now();
    let cone = an.cone();
    let a = cone.original_generators();
    let input = InputEcho {
        source: source.to_string(),
        rows: a.rows(),
        cols: a.cols(),
        matrix: (0..a.rows()).map(|i| a.row(i)).collect(),
    };
    let lattice_index: BigInt = cone.transform().divisors().iter().product();
    let cone_summary = ConeSummary {
        ambient_dim: cone.transform().ambient_dim(),
        dim: cone.dim(),
        lattice_index: lattice_index.to_string(),
        extreme_rays: cone.extreme_rays_original(),
        ray_generators: cone.ray_generators(),
        facets: cone.facet_normals_original(),
        face_counts: an.poset.counts_by_dim().iter().map(|c| c.faces).collect(),
    };
    let hilbert_basis = an.basis.elements().iter().map(|b| an.original(b)).collect();

    let box_points = box_volume(&an.sg.zonotope_box()).to_string();
    let h0 = an.sg.fundamental_holes(opts.point_budget);
    let fundamental_holes = match &h0 {
        Ok(h) => HoleSummary {
            computed: true,
            box_points,
            holes: h.holes.iter().map(|x| an.original(x)).collect(),
            reason: None,
        },
        Err(e @ Error::WindowTooLarge { .. }) => HoleSummary {
            computed: false,
            box_points,
            holes: Vec::new(),
            reason: Some(e.to_string()),
        },
        Err(_) => return Err(h0.unwrap_err()),
    };

    let r = &an.report;
    let refs = |ids: &[usize]| -> Vec<FaceRef> {
        let mut v: Vec<FaceRef> = ids.iter().map(|&i| an.face_ref(an.poset.face(i))).collect();
        v.sort();
        v
    };
    let certificates = an
        .poset
        .faces()
        .iter()
        .filter_map(|f| {
            r.certificate[f.id].as_ref().map(|b| Certificate {
                face: an.face_ref(f),
                b: an.original(b),
            })
        })
        .collect();
    let classification = ClassificationSummary {
        per_dim: r.per_dim.clone(),
        minimal_almost: refs(&r.minimal_almost),
        maximal_nowhere: refs(&r.maximal_nowhere),
        certificates,
    };

    let window = match (&opts.window, &h0) {
        (Some(w), Ok(h0)) => Some(window_summary(an, h0, w, opts.point_budget)?),
        (Some(_), Err(_)) => None,
        (None, _) => None,
    };

    let pair_types = if opts.pair_types {
        let mut tally: BTreeMap<PairType, usize> = PairType::ALL.iter().map(|&t| (t, 0)).collect();
        for &id in &r.minimal_almost {
            let f = an.poset.face(id);
            if let [x, y] = f.gen_idx[..] {
                *tally.get_mut(&pair_type_of_columns(x, y)?).expect("all types present") += 1;
            }
        }
        Some(tally)
    } else {
        None
    };

    let timing = opts.timing.then(|| {
        let mut t: BTreeMap<&'static str, f64> = an.timings.iter().cloned().collect();
        t.insert("report", started.elapsed().as_secs_f64());
        t
    });

    Ok(ReportDocument {
        input,
        cone: cone_summary,
        hilbert_basis,
        fundamental_holes,
        classification,
        window,
        pair_types,
        timing,
    })
}

fn window_summary(an: &Analysis, h0: &FundamentalHoleSet, w: &Window, budget: u64) -> Result<WindowSummary> {
    let sets = an.sg.windowed_min_sets(h0, w, budget)?;
    let crosscheck = minimal_q_crosscheck(&an.sg, &an.poset, &an.report, h0, &sets);
    let mut nowhere_witnesses = Vec::new();
    for &id in &an.report.maximal_nowhere {
        let face = an.poset.face(id);
        let (witness, reason) = match nowhere_witness(&an.sg, h0, face, w, budget) {
            Ok(wt) => (Some(wt), None),
            Err(e @ Error::NoWitnessInWindow(_)) => (None, Some(e.to_string())),
            Err(e) => return Err(e),
        };
        nowhere_witnesses.push(WitnessEntry {
            face: an.face_ref(face),
            witness,
            reason,
        });
    }
    Ok(WindowSummary {
        sets,
        crosscheck,
        nowhere_witnesses,
    })
}
