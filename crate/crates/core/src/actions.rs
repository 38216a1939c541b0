//! Isometric actions of a group on a hyperbolic space, evaluated on words:
//! the Cayley tree of a free group, hyperplane counts (actions on the dual
//! tree of a generator), `PSL₂(R)` acting on the upper half-plane, and word
//! metrics pulled back along homomorphisms.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::combings::{geodesic_representative, raag_shortlex_combing, CommutationGraph, CoxeterKind};
use crate::error::{Error, Result};
use crate::graph::GraphStructure;
use crate::group::{Group, GroupKind, GroupSpec, Letter, Scalar, Word};

/// Action specification as it appears in experiment configs:
/// `{"kind": "...", "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum ActionSpec {
    CayleyTree,
    HyperplaneCount {
        letter: String,
    },
    #[serde(rename = "matrix-h2")]
    MatrixH2 {
        /// Generator images; defaults to the matrices of a matrix group.
        #[serde(default)]
        images: Option<BTreeMap<String, [Scalar; 4]>>,
        #[serde(default)]
        delta: Option<f64>,
    },
    HomomorphismWordMetric {
        /// Generator name → word in the target group.
        map: BTreeMap<String, String>,
        target: GroupSpec,
        #[serde(default)]
        delta: Option<f64>,
    },
}

impl ActionSpec {
    pub fn hyperplane(letter: &str) -> Self {
        ActionSpec::HyperplaneCount {
            letter: letter.to_string(),
        }
    }

    pub fn matrix() -> Self {
        ActionSpec::MatrixH2 {
            images: None,
            delta: None,
        }
    }
}

impl fmt::Display for ActionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionSpec::CayleyTree => write!(f, "cayley-tree"),
            ActionSpec::HyperplaneCount { letter } => write!(f, "hyperplane-count({letter})"),
            ActionSpec::MatrixH2 { .. } => write!(f, "matrix-H2"),
            ActionSpec::HomomorphismWordMetric { .. } => write!(f, "homomorphism-word-metric"),
        }
    }
}

/// Hyperbolicity constant used for the upper half-plane.
pub fn h2_delta() -> f64 {
    (1.0 + 2f64.sqrt()).ln()
}

type Mat = [f64; 4];

#[derive(Debug, Clone)]
enum Kind {
    CayleyTree,
    HyperplaneCount { generator: usize },
    MatrixH2 { images: Vec<Mat> },
    Homomorphism { images: Vec<Word>, target: Box<GraphStructure> },
}

/// An action `G ↷ X` with basepoint `o`, evaluated on words in `G`'s alphabet.
#[derive(Debug, Clone)]
pub struct IsometricAction {
    spec: ActionSpec,
    group: Group,
    kind: Kind,
    delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranslationLength {
    pub value: f64,
    /// `d(o,go) − 2(go, g⁻¹o)_o`.
    pub proxy: f64,
    pub certificate: Option<FeketeCertificate>,
}

/// `d(o, g^{2^k} o)/2^k` for `k = 0..=5`; subadditivity makes it nonincreasing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeketeCertificate {
    pub powers: Vec<u32>,
    pub normalized: Vec<f64>,
    pub monotone: bool,
}

/// Power used for stable-length estimates.
pub const STABLE_POWER: u32 = 32;

fn det(m: &Mat) -> f64 {
    m[0] * m[3] - m[1] * m[2]
}

fn mul(x: &Mat, y: &Mat) -> Mat {
    [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
}

/// `arccosh(eˢ·x)` for `x ≥ 0`, stable for huge `s`.
fn scaled_arccosh(s: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let ln_y = s + x.ln();
    if ln_y > 20.0 {
        // arccosh y = ln 2y + O(y⁻²)
        ln_y + std::f64::consts::LN_2
    } else {
        let y = ln_y.exp();
        if y <= 1.0 {
            0.0
        } else {
            y.acosh()
        }
    }
}

/// Product of matrices kept as `eˢ·N` with `max |N| = 1` after every 16 factors.
fn scaled_product(images: &[Mat], word: &[Letter]) -> (f64, Mat) {
    let mut m: Mat = [1.0, 0.0, 0.0, 1.0];
    let mut s = 0.0;
    for (k, &x) in word.iter().enumerate() {
        m = mul(&m, &images[x as usize]);
        if (k + 1) % 16 == 0 {
            renormalize(&mut m, &mut s);
        }
    }
    renormalize(&mut m, &mut s);
    (s, m)
}

fn renormalize(m: &mut Mat, s: &mut f64) {
    let top = m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if top > 0.0 && top.is_finite() {
        for v in m.iter_mut() {
            *v /= top;
        }
        *s += top.ln();
    }
}

impl IsometricAction {
    pub fn new(spec: &ActionSpec, group: &Group) -> Result<Self> {
        let (kind, delta) = match spec {
            ActionSpec::CayleyTree => {
                if !matches!(group.kind(), GroupKind::Free | GroupKind::Matrix) {
                    return Err(Error::InvalidInput(format!(
                        "cayley-tree needs a free group, got a {} group",
                        group.kind()
                    )));
                }
                (Kind::CayleyTree, Some(0.0))
            }
            ActionSpec::HyperplaneCount { letter } => {
                if !group.has_word_problem() {
                    return Err(Error::InvalidInput("hyperplane-count needs a word problem".into()));
                }
                let generator = group
                    .generator_names()
                    .iter()
                    .position(|g| g == letter)
                    .ok_or_else(|| Error::UnknownLabel {
                        label: letter.clone(),
                        context: "hyperplane-count generator".into(),
                    })?;
                (Kind::HyperplaneCount { generator }, Some(0.0))
            }
            ActionSpec::MatrixH2 { images, delta } => {
                let per_generator: Vec<(String, Mat)> = match (images, group.spec()) {
                    (Some(map), _) => group
                        .generator_names()
                        .iter()
                        .map(|g| {
                            let m = map.get(g).ok_or_else(|| Error::UnmappedLetter(g.clone()))?;
                            Ok((g.clone(), scalars(m)?))
                        })
                        .collect::<Result<_>>()?,
                    (None, GroupSpec::Matrix { generators }) => generators
                        .iter()
                        .map(|m| Ok((m.name.clone(), scalars(&m.matrix)?)))
                        .collect::<Result<_>>()?,
                    (None, _) => {
                        return Err(Error::InvalidInput(
                            "matrix-h2 needs images or a matrix group".into(),
                        ))
                    }
                };
                for (name, m) in &per_generator {
                    let d = det(m);
                    if (d - 1.0).abs() > 1e-9 {
                        return Err(Error::NonUnitDeterminant {
                            letter: name.clone(),
                            det: d,
                        });
                    }
                }
                let images = letter_images(group, |g| {
                    let m = per_generator[g].1;
                    (m, [m[3], -m[1], -m[2], m[0]])
                })?;
                (Kind::MatrixH2 { images }, Some(delta.unwrap_or_else(h2_delta)))
            }
            ActionSpec::HomomorphismWordMetric { map, target, delta } => {
                let cg = match target {
                    GroupSpec::Free { generators } => CommutationGraph {
                        generators: generators.clone(),
                        commuting: vec![],
                        kind: CoxeterKind::Artin,
                    },
                    GroupSpec::Raag { generators, commuting } => CommutationGraph {
                        generators: generators.clone(),
                        commuting: commuting.clone(),
                        kind: CoxeterKind::Artin,
                    },
                    GroupSpec::Racg { generators, commuting } => CommutationGraph {
                        generators: generators.clone(),
                        commuting: commuting.clone(),
                        kind: CoxeterKind::Coxeter,
                    },
                    _ => {
                        return Err(Error::InvalidInput(
                            "homomorphism target must be free, raag or racg".into(),
                        ))
                    }
                };
                let combing = raag_shortlex_combing(&cg)?;
                let tg = combing.group().clone();
                let mut gen_images = Vec::new();
                for g in group.generator_names() {
                    let w = map.get(g).ok_or_else(|| Error::UnmappedLetter(g.clone()))?;
                    gen_images.push(tg.parse_word(w)?);
                }
                let images = letter_images(group, |g| {
                    let w = gen_images[g].clone();
                    let inv = tg.inverse_word(&w).expect("target letters have inverses");
                    (w, inv)
                })?;
                let delta = delta.or(matches!(target, GroupSpec::Free { .. }).then_some(0.0));
                (
                    Kind::Homomorphism {
                        images,
                        target: Box::new(combing),
                    },
                    delta,
                )
            }
        };
        Ok(IsometricAction {
            spec: spec.clone(),
            group: group.clone(),
            kind,
            delta,
        })
    }

    pub fn spec(&self) -> &ActionSpec {
        &self.spec
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    /// Declared hyperbolicity constant, if known.
    pub fn delta(&self) -> Option<f64> {
        self.delta
    }

    /// `d(o, go)`.
    pub fn displacement(&self, g: &[Letter]) -> Result<f64> {
        match &self.kind {
            Kind::CayleyTree => Ok(self.group.reduce(g)?.len() as f64),
            Kind::HyperplaneCount { generator } => Ok(self.count(&self.group.reduce(g)?, *generator)),
            Kind::MatrixH2 { images } => {
                let w = self.group.reduce(g)?;
                let (s, m) = scaled_product(images, &w);
                let norm2 = m.iter().map(|v| v * v).sum::<f64>();
                // cosh d = (a²+b²+c²+d²)/2 = e^{2s}·‖N‖²/2
                Ok(scaled_arccosh(2.0 * s, norm2 / 2.0))
            }
            Kind::Homomorphism { images, target } => {
                let w: Word = g.iter().flat_map(|&x| images[x as usize].iter().copied()).collect();
                Ok(geodesic_representative(target, &w)?.len() as f64)
            }
        }
    }

    fn count(&self, w: &[Letter], generator: usize) -> f64 {
        let alphabet = self.group.alphabet();
        w.iter().filter(|&&x| alphabet.generator(x) == generator).count() as f64
    }

    /// `(go, ho)_o = ½(d(o,go) + d(o,ho) − d(go,ho))`.
    pub fn gromov_product(&self, g: &[Letter], h: &[Letter]) -> Result<f64> {
        let mut gh = self.group.inverse_word(g)?;
        gh.extend_from_slice(h);
        let v = 0.5 * (self.displacement(g)? + self.displacement(h)? - self.displacement(&gh)?);
        Ok(v.max(0.0))
    }

    /// Exact (or, for homomorphisms, estimated) translation length together
    /// with the Gromov-product proxy.
    pub fn translation_length(&self, g: &[Letter]) -> Result<TranslationLength> {
        let d = self.displacement(g)?;
        let inverse = self.group.inverse_word(g)?;
        let proxy = d - 2.0 * self.gromov_product(g, &inverse)?;
        let (value, certificate) = match &self.kind {
            Kind::CayleyTree => (self.group.cyclic_reduce(g)?.len() as f64, None),
            Kind::HyperplaneCount { generator } => (self.count(&self.group.cyclic_reduce(g)?, *generator), None),
            Kind::MatrixH2 { images } => {
                let w = self.group.cyclic_reduce(g)?;
                let (s, m) = scaled_product(images, &w);
                let tr = (m[0] + m[3]).abs();
                // |tr| > 2  ⇔  s + ln(|trN|/2) > 0
                let tau = if tr > 0.0 && s + (tr / 2.0).ln() > 1e-12 {
                    2.0 * scaled_arccosh(s, tr / 2.0)
                } else {
                    0.0
                };
                (tau, None)
            }
            Kind::Homomorphism { .. } => {
                let mut powers = Vec::new();
                let mut normalized = Vec::new();
                let mut k = 1u32;
                while k <= STABLE_POWER {
                    let w: Word = (0..k).flat_map(|_| g.iter().copied()).collect();
                    powers.push(k);
                    normalized.push(self.displacement(&w)? / k as f64);
                    k *= 2;
                }
                let monotone = normalized.windows(2).all(|p| p[1] <= p[0] + 1e-12);
                let value = *normalized.last().expect("at least one power");
                (
                    value,
                    Some(FeketeCertificate {
                        powers,
                        normalized,
                        monotone,
                    }),
                )
            }
        };
        Ok(TranslationLength {
            value,
            proxy,
            certificate,
        })
    }
}

fn scalars(m: &[Scalar; 4]) -> Result<Mat> {
    Ok([m[0].value()?, m[1].value()?, m[2].value()?, m[3].value()?])
}

/// Per-letter images from per-generator `(image, inverse image)` pairs.
fn letter_images<T: Clone>(group: &Group, f: impl Fn(usize) -> (T, T)) -> Result<Vec<T>> {
    let alphabet = group.alphabet();
    let pairs: Vec<(T, T)> = (0..group.generator_names().len()).map(f).collect();
    alphabet
        .letters()
        .map(|x| {
            let g = alphabet.generator(x);
            let is_inverse = alphabet.inverse(x).is_some_and(|y| y < x);
            if is_inverse {
                Ok(pairs[g].1.clone())
            } else if alphabet.inverse(x).is_some() {
                Ok(pairs[g].0.clone())
            } else {
                Err(Error::InvalidInput("opaque letters cannot act".into()))
            }
        })
        .collect()
}
