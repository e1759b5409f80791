use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GaeError {
    #[error("rewards, values and dones have lengths {rewards}, {values}, {dones}")]
    LengthMismatch { rewards: usize, values: usize, dones: usize },
}

/// Generalized advantage estimates and value targets for one actor's
/// rollout segment.
///
/// `values[t]` is `V(s_t)`; `dones[t]` marks that the episode ended after the
/// transition at `t`, which zeroes the bootstrap and cuts the recursion.
/// `last_value` is `V` of the state following the final transition (ignored
/// if that transition was terminal).
///
/// `A_t = δ_t + γλ A_{t+1}` with `δ_t = r_t + γ V(s_{t+1}) − V(s_t)`, and the
/// value target is `A_t + V(s_t)`.
pub fn compute_gae(
    rewards: &[f64],
    values: &[f64],
    dones: &[bool],
    last_value: f64,
    gamma: f64,
    lambda: f64,
) -> Result<(Vec<f64>, Vec<f64>), GaeError> {
    let n = rewards.len();
    if values.len() != n || dones.len() != n {
        return Err(GaeError::LengthMismatch {
            rewards: n,
            values: values.len(),
            dones: dones.len(),
        });
    }
    let mut advantages = alloc::vec![0.0; n];
    let mut next_adv = 0.0;
    let mut next_value = last_value;
    for t in (0..n).rev() {
        let live = if dones[t] { 0.0 } else { 1.0 };
        let delta = rewards[t] + gamma * next_value * live - values[t];
        next_adv = delta + gamma * lambda * live * next_adv;
        advantages[t] = next_adv;
        next_value = values[t];
    }
    let targets = advantages.iter().zip(values).map(|(a, v)| a + v).collect();
    Ok((advantages, targets))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_terminal_step() {
        let (adv, tgt) = compute_gae(&[1.0], &[0.0], &[true], 5.0, 0.99, 0.95).unwrap();
        assert_eq!(adv, [1.0]);
        assert_eq!(tgt, [1.0]);
    }

    #[test]
    fn lambda_zero_is_td_residual() {
        let r = [0.5, -1.0, 0.25];
        let v = [0.1, 0.2, -0.3];
        let (adv, _) = compute_gae(&r, &v, &[false, false, false], 0.7, 0.9, 0.0).unwrap();
        let expected = [0.5 + 0.9 * 0.2 - 0.1, -1.0 + 0.9 * -0.3 - 0.2, 0.25 + 0.9 * 0.7 + 0.3];
        for (a, e) in adv.iter().zip(expected) {
            assert_eq!(*a, e);
        }
    }

    #[test]
    fn done_cuts_recursion() {
        let (adv, _) = compute_gae(&[0.0, -1.0, 0.0], &[0.0; 3], &[false, true, false], 0.0, 1.0, 1.0)
            .unwrap();
        assert_eq!(adv, [-1.0, -1.0, 0.0]);
    }

    #[test]
    fn length_mismatch() {
        assert_eq!(
            compute_gae(&[0.0; 3], &[0.0; 2], &[false; 3], 0.0, 0.99, 0.95),
            Err(GaeError::LengthMismatch { rewards: 3, values: 2, dones: 3 })
        );
    }
}
