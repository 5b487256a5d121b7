//! Normal-form fixture circuits used by tests and the `gen` subcommand.

use crate::circuit::{Circuit, GateKind};

/// Lift a wire from level 0 up to just below the first MOD level.
fn lift_to_mod(c: &mut Circuit, p: usize) -> usize {
    let a = c.push(GateKind::Or, 1, vec![p]);
    c.push(GateKind::And, 2, vec![a])
}

/// Parity of `width` bits: one MOD-2 gate over the (negated) inputs with a
/// parity-correcting constant pad.
///
/// `Σ(1 - x_i) + pad ≡ 0 (mod 2)` iff `Σ x_i ≡ width + pad (mod 2)`, so
/// with `pad = (width + 1) mod 2` the gate outputs the parity itself.
pub fn parity_circuit(width: usize) -> Circuit {
    let mut c = Circuit::new(width);
    let mut preds = Vec::new();
    for j in 0..width {
        preds.push(c.push(GateKind::NegInput(j), 0, vec![]));
    }
    for _ in 0..(width + 1) % 2 {
        preds.push(c.push(GateKind::Const(true), 0, vec![]));
    }
    let lifted: Vec<usize> = preds.into_iter().map(|p| lift_to_mod(&mut c, p)).collect();
    let m = c.push(GateKind::ModP(2), 3, lifted);
    c.outputs.push(m);
    c
}

/// `[popcount(x) ≡ r (mod n)]`: a single MOD-n gate over the inputs plus
/// `(n - r) mod n` constant-1 pads.
pub fn mod_counter(width: usize, n: u32, r: u32) -> Circuit {
    let mut c = Circuit::new(width);
    let mut preds = Vec::new();
    for j in 0..width {
        let i = c.push(GateKind::Input(j), 0, vec![]);
        preds.push(lift_to_mod(&mut c, i));
    }
    for _ in 0..(n - r) % n {
        let k = c.push(GateKind::Const(true), 2, vec![]);
        preds.push(k);
    }
    let m = c.push(GateKind::ModP(n), 3, preds);
    c.outputs.push(m);
    c
}

/// Nested ∧/∨: `OR_j (x_{2j} ∧ x_{2j+1})` (the last odd input, if any,
/// joins alone).
pub fn and_or_circuit(width: usize) -> Circuit {
    let mut c = Circuit::new(width);
    let mut pairs = Vec::new();
    let mut j = 0;
    while j < width {
        let a = c.push(GateKind::Input(j), 0, vec![]);
        let a = c.push(GateKind::Or, 1, vec![a]);
        let preds = if j + 1 < width {
            let b = c.push(GateKind::Input(j + 1), 0, vec![]);
            let b = c.push(GateKind::Or, 1, vec![b]);
            vec![a, b]
        } else {
            vec![a]
        };
        pairs.push(c.push(GateKind::And, 2, preds));
        j += 2;
    }
    // bridge the MOD level with identity gadgets, then join with ∨
    let mut bridged = Vec::new();
    for p in pairs {
        let pad = c.push(GateKind::Const(true), 2, vec![]);
        bridged.push(c.push(GateKind::ModP(2), 3, vec![p, pad]));
    }
    let top = c.push(GateKind::Or, 4, bridged);
    c.outputs.push(top);
    c
}

/// Two-output circuit: output 0 is `x_0 ∧ x_{w-1}`, output 1 is
/// `x_0 ∨ x_{w-1}` (∨ lifted to the common ∧ top level).
pub fn two_output_circuit(width: usize) -> Circuit {
    let mut c = Circuit::new(width);
    let a = c.push(GateKind::Input(0), 0, vec![]);
    let b = c.push(GateKind::Input(width - 1), 0, vec![]);
    let a1 = c.push(GateKind::Or, 1, vec![a]);
    let b1 = c.push(GateKind::Or, 1, vec![b]);
    let and = c.push(GateKind::And, 2, vec![a1, b1]);
    let or = c.push(GateKind::Or, 1, vec![a, b]);
    let or2 = c.push(GateKind::And, 2, vec![or]);
    c.outputs = vec![and, or2];
    c
}

/// Negated parity: `1 - parity(x)` as `[Σ x_i ≡ 0 (mod 2)]` directly.
pub fn parity_complement_circuit(width: usize) -> Circuit {
    mod_counter(width, 2, 0)
}

/// Single passthrough wire: output = input bit 0, lifted to level 2.
pub fn identity_wire_circuit(width: usize) -> Circuit {
    let mut c = Circuit::new(width);
    let a = c.push(GateKind::Input(0), 0, vec![]);
    let o = lift_to_mod(&mut c, a);
    c.outputs.push(o);
    c
}

/// The standard fixture set exercised by the compiler tests: parities,
/// MOD-3 counters, nested ∧/∨, multi-output and passthrough shapes over
/// widths 2–10.
pub fn fixture_set() -> Vec<(String, Circuit)> {
    let mut out = Vec::new();
    for width in [2usize, 3, 4, 5, 6] {
        out.push((format!("parity{width}"), parity_circuit(width)));
    }
    out.push(("mod3w4".into(), mod_counter(4, 3, 0)));
    out.push(("mod3w6r1".into(), mod_counter(6, 3, 1)));
    out.push(("mod5w5".into(), mod_counter(5, 5, 2)));
    out.push(("andor4".into(), and_or_circuit(4)));
    out.push(("andor7".into(), and_or_circuit(7)));
    out.push(("twoout5".into(), two_output_circuit(5)));
    out.push(("cparity10".into(), parity_complement_circuit(10)));
    out.push(("idwire3".into(), identity_wire_circuit(3)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::validate_nf;

    #[test]
    fn all_fixtures_are_normal_form() {
        for (name, c) in fixture_set() {
            assert!(validate_nf(&c).is_empty(), "{name}: {:?}", validate_nf(&c));
        }
    }

    #[test]
    fn fixture_semantics_spot_checks() {
        let c = mod_counter(4, 3, 0);
        for x in 0u64..16 {
            assert_eq!(c.eval_u64(x).unwrap(), u64::from(x.count_ones() % 3 == 0));
        }
        let c = and_or_circuit(4);
        for x in 0u64..16 {
            let want = (x & 1 == 1 && x >> 1 & 1 == 1) || (x >> 2 & 1 == 1 && x >> 3 & 1 == 1);
            assert_eq!(c.eval_u64(x).unwrap(), u64::from(want), "x = {x}");
        }
        let c = two_output_circuit(5);
        for x in 0u64..32 {
            let (a, b) = (x & 1, x >> 4 & 1);
            assert_eq!(c.eval_u64(x).unwrap(), (a & b) | ((a | b) << 1), "x = {x}");
        }
    }
}
