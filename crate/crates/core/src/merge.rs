//! Linear checkpoint merging over named tensors.
//!
//! Merging is elementwise: `out = w * a + (1 - w) * b`, accumulated in f64
//! and stored back as f32 to bound rounding drift.

use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

/// One named tensor: shape plus a flat little-endian-ordered value array.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub name: String,
    pub shape: Vec<usize>,
    pub values: Vec<f32>,
}

impl Tensor {
    pub fn new(name: impl Into<String>, shape: Vec<usize>, values: Vec<f32>) -> Result<Self, MergeError> {
        let name = name.into();
        let expected: usize = shape.iter().product();
        if values.len() != expected {
            return Err(MergeError::ShapeValueMismatch {
                tensor: name,
                expected,
                actual: values.len(),
            });
        }
        Ok(Self { name, shape, values })
    }
}

/// An ordered collection of named tensors. Iteration order is construction
/// (file) order; names are unique.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Checkpoint {
    tensors: Vec<Tensor>,
}

impl Checkpoint {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, tensor: Tensor) -> Result<(), MergeError> {
        if self.tensors.iter().any(|t| t.name == tensor.name) {
            return Err(MergeError::DuplicateTensor(tensor.name));
        }
        self.tensors.push(tensor);
        Ok(())
    }

    pub fn from_tensors(tensors: Vec<Tensor>) -> Result<Self, MergeError> {
        let mut ckpt = Self::new();
        for t in tensors {
            ckpt.push(t)?;
        }
        Ok(ckpt)
    }

    pub fn get(&self, name: &str) -> Option<&Tensor> {
        self.tensors.iter().find(|t| t.name == name)
    }

    pub fn tensors(&self) -> &[Tensor] {
        &self.tensors
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }
}

/// Weight on the first source of a two-way merge, in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeRatio {
    w: f64,
}

impl MergeRatio {
    pub fn new(w: f64) -> Result<Self, MergeError> {
        if !(0.0..=1.0).contains(&w) {
            return Err(MergeError::RatioOutOfRange(w));
        }
        Ok(Self { w })
    }

    pub fn weight(self) -> f64 {
        self.w
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum MergeError {
    #[error("malformed ratio `{0}`: expected two nonnegative integers like `8:2`")]
    MalformedRatio(String),
    #[error("ratio `0:0` has no weight")]
    ZeroRatio,
    #[error("ratio weight {0} outside [0, 1]")]
    RatioOutOfRange(f64),
    #[error("tensor `{tensor}` declares {expected} values from its shape but carries {actual}")]
    ShapeValueMismatch {
        tensor: String,
        expected: usize,
        actual: usize,
    },
    #[error("duplicate tensor name `{0}`")]
    DuplicateTensor(String),
    #[error("tensor name sets differ; only in first: [{only_a}], only in second: [{only_b}]")]
    NameSetMismatch { only_a: String, only_b: String },
    #[error("tensor `{0}` has mismatched shapes")]
    ShapeMismatch(String),
    #[error("merge chain needs at least two checkpoints, got {0}")]
    TooFewCheckpoints(usize),
    #[error("chain weights must be nonnegative and sum to 1 (sum was {0})")]
    BadChainWeights(f64),
}

/// Parses a `src1:src2` ratio like `8:2` into the weight on src1 (`0.8`).
pub fn parse_ratio(text: &str) -> Result<MergeRatio, MergeError> {
    let malformed = || MergeError::MalformedRatio(String::from(text));
    let (a_str, b_str) = text.split_once(':').ok_or_else(malformed)?;
    let a: u64 = a_str.trim().parse().map_err(|_| malformed())?;
    let b: u64 = b_str.trim().parse().map_err(|_| malformed())?;
    if a == 0 && b == 0 {
        return Err(MergeError::ZeroRatio);
    }
    MergeRatio::new(a as f64 / (a + b) as f64)
}

fn check_aligned(a: &Checkpoint, b: &Checkpoint) -> Result<(), MergeError> {
    let names_a: Vec<&str> = a.tensors.iter().map(|t| t.name.as_str()).collect();
    let names_b: Vec<&str> = b.tensors.iter().map(|t| t.name.as_str()).collect();
    let only_a: Vec<&str> = names_a
        .iter()
        .filter(|n| !names_b.contains(n))
        .copied()
        .collect();
    let only_b: Vec<&str> = names_b
        .iter()
        .filter(|n| !names_a.contains(n))
        .copied()
        .collect();
    if !only_a.is_empty() || !only_b.is_empty() {
        return Err(MergeError::NameSetMismatch {
            only_a: only_a.join(", "),
            only_b: only_b.join(", "),
        });
    }
    for ta in &a.tensors {
        let tb = b.get(&ta.name).expect("name sets match");
        if ta.shape != tb.shape {
            return Err(MergeError::ShapeMismatch(ta.name.clone()));
        }
    }
    Ok(())
}

/// `out[name][i] = w * a[name][i] + (1 - w) * b[name][i]`, in a's tensor order.
pub fn merge_linear(a: &Checkpoint, b: &Checkpoint, r: MergeRatio) -> Result<Checkpoint, MergeError> {
    check_aligned(a, b)?;
    let w = r.weight();
    let mut out = Checkpoint::new();
    for ta in &a.tensors {
        let tb = b.get(&ta.name).expect("name sets match");
        let values = ta
            .values
            .iter()
            .zip(tb.values.iter())
            .map(|(&x, &y)| (w * x as f64 + (1.0 - w) * y as f64) as f32)
            .collect();
        out.push(Tensor {
            name: ta.name.clone(),
            shape: ta.shape.clone(),
            values,
        })?;
    }
    Ok(out)
}

const CHAIN_WEIGHT_TOL: f64 = 1e-9;

/// Elementwise weighted sum of several checkpoints: `out = sum(w_k * ckpt_k)`.
/// Weights must be nonnegative and sum to 1. Equivalent to folding
/// `merge_linear` with reweighted ratios.
pub fn merge_chain(checkpoints: &[&Checkpoint], weights: &[f64]) -> Result<Checkpoint, MergeError> {
    if checkpoints.len() < 2 {
        return Err(MergeError::TooFewCheckpoints(checkpoints.len()));
    }
    let sum: f64 = weights.iter().sum();
    if weights.len() != checkpoints.len()
        || weights.iter().any(|&w| w < 0.0)
        || (sum - 1.0).abs() > CHAIN_WEIGHT_TOL
    {
        return Err(MergeError::BadChainWeights(sum));
    }
    let first = checkpoints[0];
    for other in &checkpoints[1..] {
        check_aligned(first, other)?;
    }
    let mut out = Checkpoint::new();
    for ta in &first.tensors {
        let mut acc: Vec<f64> = ta.values.iter().map(|&x| weights[0] * x as f64).collect();
        for (ck, &w) in checkpoints[1..].iter().zip(&weights[1..]) {
            // Aligned name sets guarantee the tensor exists; order may differ.
            let t = ck.get(&ta.name).expect("name sets match");
            for (a, &x) in acc.iter_mut().zip(t.values.iter()) {
                *a += w * x as f64;
            }
        }
        out.push(Tensor {
            name: ta.name.clone(),
            shape: ta.shape.clone(),
            values: acc.into_iter().map(|x| x as f32).collect(),
        })?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ckpt(pairs: &[(&str, &[f32])]) -> Checkpoint {
        Checkpoint::from_tensors(
            pairs
                .iter()
                .map(|(n, v)| Tensor::new(*n, vec![v.len()], v.to_vec()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn parse_ratio_table_values() {
        assert_eq!(parse_ratio("8:2").unwrap().weight(), 0.8);
        assert_eq!(parse_ratio("5:5").unwrap().weight(), 0.5);
        assert_eq!(parse_ratio("2:8").unwrap().weight(), 0.2);
        assert_eq!(parse_ratio("0:1").unwrap().weight(), 0.0);
    }

    #[test]
    fn parse_ratio_rejects_garbage() {
        assert!(matches!(parse_ratio("8"), Err(MergeError::MalformedRatio(_))));
        assert!(matches!(parse_ratio("a:b"), Err(MergeError::MalformedRatio(_))));
        assert!(matches!(parse_ratio("-1:2"), Err(MergeError::MalformedRatio(_))));
        assert_eq!(parse_ratio("0:0"), Err(MergeError::ZeroRatio));
    }

    #[test]
    fn merge_same_checkpoint_is_identity() {
        let a = ckpt(&[("w", &[1.25, -3.5, 0.0, 7.75])]);
        for ratio in ["0:1", "5:5", "1:0"] {
            let out = merge_linear(&a, &a, parse_ratio(ratio).unwrap()).unwrap();
            // Bitwise equality.
            for (x, y) in out.tensors()[0].values.iter().zip(&a.tensors()[0].values) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn merge_endpoints() {
        let a = ckpt(&[("w", &[1.0, 2.0])]);
        let b = ckpt(&[("w", &[5.0, 6.0])]);
        let at_a = merge_linear(&a, &b, MergeRatio::new(1.0).unwrap()).unwrap();
        assert_eq!(at_a.tensors()[0].values, vec![1.0, 2.0]);
        let at_b = merge_linear(&a, &b, MergeRatio::new(0.0).unwrap()).unwrap();
        assert_eq!(at_b.tensors()[0].values, vec![5.0, 6.0]);
    }

    #[test]
    fn merge_scalar_midpoint() {
        let a = ckpt(&[("w", &[2.0])]);
        let b = ckpt(&[("w", &[4.0])]);
        let out = merge_linear(&a, &b, MergeRatio::new(0.5).unwrap()).unwrap();
        assert_eq!(out.tensors()[0].values, vec![3.0]);
    }

    #[test]
    fn name_set_mismatch_lists_difference() {
        let a = ckpt(&[("w", &[1.0]), ("x", &[1.0])]);
        let b = ckpt(&[("w", &[1.0]), ("y", &[1.0])]);
        match merge_linear(&a, &b, MergeRatio::new(0.5).unwrap()) {
            Err(MergeError::NameSetMismatch { only_a, only_b }) => {
                assert_eq!(only_a, "x");
                assert_eq!(only_b, "y");
            }
            other => panic!("expected name-set mismatch, got {other:?}"),
        }
    }

    #[test]
    fn shape_mismatch_names_tensor() {
        let a = ckpt(&[("w", &[1.0, 2.0])]);
        let b = Checkpoint::from_tensors(vec![
            Tensor::new("w", vec![2, 1], vec![1.0, 2.0]).unwrap(),
        ])
        .unwrap();
        assert_eq!(
            merge_linear(&a, &b, MergeRatio::new(0.5).unwrap()),
            Err(MergeError::ShapeMismatch(String::from("w")))
        );
    }

    #[test]
    fn chain_equal_thirds_of_equal_inputs() {
        let a = ckpt(&[("w", &[3.0, -6.0])]);
        let out = merge_chain(&[&a, &a, &a], &[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]).unwrap();
        for (x, y) in out.tensors()[0].values.iter().zip(&a.tensors()[0].values) {
            assert!((x - y).abs() < 1e-6);
        }
    }

    #[test]
    fn chain_degenerate_weights_select_first() {
        let a = ckpt(&[("w", &[1.0])]);
        let b = ckpt(&[("w", &[9.0])]);
        let c = ckpt(&[("w", &[5.0])]);
        let out = merge_chain(&[&a, &b, &c], &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(out.tensors()[0].values, vec![1.0]);
    }

    #[test]
    fn chain_two_inputs_equals_linear() {
        let a = ckpt(&[("w", &[1.0, 2.0, 3.0])]);
        let b = ckpt(&[("w", &[7.0, -1.0, 0.5])]);
        let chain = merge_chain(&[&a, &b], &[0.3, 0.7]).unwrap();
        let lin = merge_linear(&a, &b, MergeRatio::new(0.3).unwrap()).unwrap();
        for (x, y) in chain.tensors()[0].values.iter().zip(&lin.tensors()[0].values) {
            assert!((x - y).abs() < 1e-7);
        }
    }

    #[test]
    fn chain_rejects_bad_weights() {
        let a = ckpt(&[("w", &[1.0])]);
        let b = ckpt(&[("w", &[2.0])]);
        assert!(matches!(
            merge_chain(&[&a, &b], &[0.5, 0.6]),
            Err(MergeError::BadChainWeights(_))
        ));
        assert!(matches!(
            merge_chain(&[&a], &[1.0]),
            Err(MergeError::TooFewCheckpoints(1))
        ));
    }

    #[test]
    fn tensor_shape_must_match_values() {
        assert!(matches!(
            Tensor::new("w", vec![2, 2], vec![1.0, 2.0]),
            Err(MergeError::ShapeValueMismatch { .. })
        ));
    }

    #[test]
    fn output_order_follows_first_input() {
        let a = ckpt(&[("b", &[1.0]), ("a", &[2.0])]);
        let mut b_tensors = vec![
            Tensor::new("a", vec![1], vec![4.0]).unwrap(),
            Tensor::new("b", vec![1], vec![3.0]).unwrap(),
        ];
        b_tensors.rotate_left(0);
        let b = Checkpoint::from_tensors(b_tensors).unwrap();
        let out = merge_linear(&a, &b, MergeRatio::new(0.5).unwrap()).unwrap();
        assert_eq!(out.tensors()[0].name, "b");
        assert_eq!(out.tensors()[1].name, "a");
        assert_eq!(out.tensors()[0].values, vec![2.0]);
        assert_eq!(out.tensors()[1].values, vec![3.0]);
    }
}
