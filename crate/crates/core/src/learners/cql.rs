use rand::Rng;

use super::qtable::QTable;
use super::schedule::LearnerParams;
use super::select::{argmax_uniform, epsilon_greedy};
use crate::env::{Action, StateKey};
use crate::error::{Error, Result};

const BASE: usize = Action::COUNT;
const MAX_TEAM: usize = 8;

/// Mixed-radix index of a joint action; member 0 is the least significant digit.
pub fn encode_joint(actions: &[Action]) -> usize {
    actions.iter().rev().fold(0, |acc, a| acc * BASE + a.index())
}

/// Inverse of [`encode_joint`] for a team of `members` agents.
pub fn decode_joint(index: usize, members: usize) -> Vec<Action> {
    let mut out = vec![Action::Stay; members];
    decode_joint_into(index, &mut out);
    out
}

pub fn decode_joint_into(mut index: usize, out: &mut [Action]) {
    for slot in out.iter_mut() {
        *slot = Action::ALL[index % BASE];
        index /= BASE;
    }
}

/// Joint action space of a team together with, for every subset of dead
/// members, the joint indices whose dead components are STAY.
#[derive(Debug, Clone)]
pub struct JointSpace {
    members: usize,
    size: usize,
    valid: Vec<Vec<u32>>,
}

impl JointSpace {
    pub fn new(members: usize) -> Result<Self> {
        if members == 0 || members > MAX_TEAM {
            return Err(Error::contract(format!(
                "centralized team size must be in 1..={MAX_TEAM}, got {members}"
            )));
        }
        let size = BASE.pow(members as u32);
        let valid = (0..1usize << members)
            .map(|dead_mask| {
                (0..size as u32)
                    .filter(|&j| {
                        (0..members).all(|m| {
                            dead_mask & (1 << m) == 0 || digit(j as usize, m) == Action::Stay.index()
                        })
                    })
                    .collect()
            })
            .collect();
        Ok(JointSpace { members, size, valid })
    }

    pub fn members(&self) -> usize {
        self.members
    }

    /// `5^members`.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Joint indices consistent with `dead_mask` (bit `m` set: member `m` is dead).
    pub fn valid(&self, dead_mask: u32) -> &[u32] {
        &self.valid[dead_mask as usize]
    }
}

#[inline]
fn digit(joint: usize, member: usize) -> usize {
    (joint / BASE.pow(member as u32)) % BASE
}

/// Epsilon-greedy joint action. Exploration draws uniformly from the joint
/// actions consistent with `dead_mask`; the greedy branch maximizes over the
/// same set, so dead members' components are always STAY.
pub fn cql_select_joint<R: Rng + ?Sized>(
    q: &QTable,
    s: StateKey,
    space: &JointSpace,
    dead_mask: u32,
    epsilon: f64,
    rng: &mut R,
) -> usize {
    epsilon_greedy(q.row(s), space.valid(dead_mask), epsilon, rng) as usize
}

/// One tabular update on a joint entry. `next_valid` lists the joint indices
/// admissible in `s_next`; the bootstrap maximizes over them and is zero at
/// terminal transitions.
#[allow(clippy::too_many_arguments)]
pub fn cql_update(
    q: &mut QTable,
    s: StateKey,
    joint: usize,
    reward: f64,
    s_next: StateKey,
    next_valid: &[u32],
    terminal: bool,
    params: &LearnerParams,
) -> Result<()> {
    if !reward.is_finite() {
        return Err(Error::contract(format!("non-finite reward {reward}")));
    }
    if joint >= q.width() {
        return Err(Error::contract(format!("joint index {joint} outside table width {}", q.width())));
    }
    let bootstrap = if terminal { 0.0 } else { q.max_over(s_next, next_valid) };
    let target = reward + params.gamma * bootstrap;
    let entry = &mut q.row_mut(s)[joint];
    *entry += params.alpha * (target - *entry);
    Ok(())
}

/// Per-action values of `member` obtained by averaging the joint row over
/// every completion by the other members, uniformly.
pub fn marginalize(q: &QTable, s: StateKey, members: usize, member: usize) -> [f64; Action::COUNT] {
    let all: Vec<u32> = (0..BASE as u32).collect();
    let supports: Vec<&[u32]> = vec![&all; members];
    marginalize_with_support(q, s, member, &supports)
}

/// As [`marginalize`], but the other members' actions range uniformly over
/// `supports[m]` instead of all five actions. `supports[member]` is ignored.
pub fn marginalize_with_support(
    q: &QTable,
    s: StateKey,
    member: usize,
    supports: &[&[u32]],
) -> [f64; Action::COUNT] {
    assert!(member < supports.len(), "member {member} not in a team of {}", supports.len());
    let Some(row) = q.row(s) else {
        return [q.default_value(); Action::COUNT];
    };
    let mut out = [0.0; Action::COUNT];
    let others: Vec<usize> = (0..supports.len()).filter(|&m| m != member).collect();
    let completions: usize = others.iter().map(|&m| supports[m].len()).product();
    assert!(completions > 0, "empty action support");
    let mut cursor = vec![0usize; others.len()];
    for (a, slot) in out.iter_mut().enumerate() {
        cursor.iter_mut().for_each(|c| *c = 0);
        let mut sum = 0.0;
        loop {
            let mut joint = a * BASE.pow(member as u32);
            for (k, &m) in others.iter().enumerate() {
                joint += supports[m][cursor[k]] as usize * BASE.pow(m as u32);
            }
            sum += row[joint];
            // odometer over the other members' supports
            let mut k = 0;
            while k < others.len() {
                cursor[k] += 1;
                if cursor[k] < supports[others[k]].len() {
                    break;
                }
                cursor[k] = 0;
                k += 1;
            }
            if k == others.len() {
                break;
            }
        }
        *slot = sum / completions as f64;
    }
    out
}

/// One joint-action Q-table for a whole team.
#[derive(Debug, Clone)]
pub struct CentralizedLearner {
    table: QTable,
    space: JointSpace,
}

impl CentralizedLearner {
    pub fn new(members: usize) -> Result<Self> {
        let space = JointSpace::new(members)?;
        Ok(CentralizedLearner {
            table: QTable::new(space.size()),
            space,
        })
    }

    pub fn table(&self) -> &QTable {
        &self.table
    }

    pub fn space(&self) -> &JointSpace {
        &self.space
    }

    /// Writes the selected joint action into `out` (one slot per member) and
    /// returns its joint index.
    pub fn select<R: Rng + ?Sized>(
        &self,
        s: StateKey,
        dead_mask: u32,
        epsilon: f64,
        rng: &mut R,
        out: &mut [Action],
    ) -> usize {
        let joint = cql_select_joint(&self.table, s, &self.space, dead_mask, epsilon, rng);
        decode_joint_into(joint, out);
        joint
    }

    #[allow(clippy::too_many_arguments)]
    pub fn update(
        &mut self,
        s: StateKey,
        joint: usize,
        reward: f64,
        s_next: StateKey,
        next_dead_mask: u32,
        terminal: bool,
        params: &LearnerParams,
    ) -> Result<()> {
        let valid = self.space.valid(next_dead_mask);
        cql_update(&mut self.table, s, joint, reward, s_next, valid, terminal, params)
    }

    /// Decentralized greedy action of `member`: argmax of its marginal values,
    /// with dead teammates pinned to STAY. Ties are broken uniformly.
    pub fn marginal_greedy<R: Rng + ?Sized>(&self, s: StateKey, member: usize, dead_mask: u32, rng: &mut R) -> Action {
        const ALL: [u32; BASE] = [0, 1, 2, 3, 4];
        const STAY: [u32; 1] = [Action::Stay as u32];
        let supports: Vec<&[u32]> = (0..self.space.members)
            .map(|m| if dead_mask & (1 << m) != 0 { &STAY[..] } else { &ALL[..] })
            .collect();
        let marg = marginalize_with_support(&self.table, s, member, &supports);
        Action::ALL[argmax_uniform(Some(&marg), &ALL, rng) as usize]
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::learners::iql::{iql_select, iql_update};

    const P: LearnerParams = LearnerParams { alpha: 0.25, gamma: 0.9 };

    #[test]
    fn joint_index_bijection_k2() {
        let mut seen = std::collections::HashSet::new();
        for a in Action::ALL {
            for b in Action::ALL {
                let j = encode_joint(&[a, b]);
                assert!(j < 25 && seen.insert(j));
                assert_eq!(decode_joint(j, 2), vec![a, b]);
            }
        }
        assert_eq!(seen.len(), 25);
    }

    #[test]
    fn valid_sets_pin_dead_members() {
        let space = JointSpace::new(2).unwrap();
        assert_eq!(space.valid(0).len(), 25);
        assert_eq!(space.valid(0b01).len(), 5);
        assert!(space
            .valid(0b01)
            .iter()
            .all(|&j| decode_joint(j as usize, 2)[0] == Action::Stay));
        assert_eq!(space.valid(0b11), &[encode_joint(&[Action::Stay, Action::Stay]) as u32]);
        assert!(JointSpace::new(0).is_err());
    }

    #[test]
    fn greedy_joint_unique_argmax() {
        let mut q = QTable::new(25);
        q.set(StateKey(1), encode_joint(&[Action::Right, Action::Up]), 5.0);
        let space = JointSpace::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            let j = cql_select_joint(&q, StateKey(1), &space, 0, 0.0, &mut rng);
            assert_eq!(decode_joint(j, 2), vec![Action::Right, Action::Up]);
        }
    }

    #[test]
    fn dead_member_is_forced_to_stay() {
        let mut q = QTable::new(25);
        q.set(StateKey(1), encode_joint(&[Action::Right, Action::Up]), 5.0);
        q.set(StateKey(1), encode_joint(&[Action::Stay, Action::Down]), 1.0);
        let space = JointSpace::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for eps in [0.0, 0.5, 1.0] {
            for _ in 0..200 {
                let j = cql_select_joint(&q, StateKey(1), &space, 0b01, eps, &mut rng);
                assert_eq!(decode_joint(j, 2)[0], Action::Stay);
            }
        }
        let j = cql_select_joint(&q, StateKey(1), &space, 0b01, 0.0, &mut rng);
        assert_eq!(decode_joint(j, 2), vec![Action::Stay, Action::Down]);
    }

    #[test]
    fn full_exploration_uniform_over_25() {
        let q = QTable::new(25);
        let space = JointSpace::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut counts = [0u64; 25];
        let draws = 250_000;
        for _ in 0..draws {
            counts[cql_select_joint(&q, StateKey(3), &space, 0, 1.0, &mut rng)] += 1;
        }
        let expected = draws as f64 / 25.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // chi-square critical value, 24 degrees of freedom, alpha = 0.01
        assert!(chi2 < 42.98, "chi2 = {chi2}");
    }

    #[test]
    fn update_examples() {
        let space = JointSpace::new(2).unwrap();
        let mut q = QTable::new(25);
        cql_update(&mut q, StateKey(1), 7, 2.6, StateKey(2), space.valid(0), false, &P).unwrap();
        assert!((q.get(StateKey(1), 7) - 0.65).abs() < 1e-12);
        let mut q = QTable::new(25);
        cql_update(&mut q, StateKey(1), 7, 0.0, StateKey(2), space.valid(0), false, &P).unwrap();
        assert!(q.row(StateKey(1)).unwrap().iter().all(|&v| v == 0.0));
        assert!(cql_update(&mut q, StateKey(1), 25, 0.0, StateKey(2), space.valid(0), false, &P).is_err());
        assert!(cql_update(&mut q, StateKey(1), 0, f64::INFINITY, StateKey(2), space.valid(0), false, &P).is_err());
    }

    #[test]
    fn bootstrap_respects_dead_members() {
        let space = JointSpace::new(2).unwrap();
        let mut q = QTable::new(25);
        // only a non-admissible joint entry of s_next is positive
        q.set(StateKey(2), encode_joint(&[Action::Up, Action::Up]), 100.0);
        q.set(StateKey(2), encode_joint(&[Action::Stay, Action::Up]), -10.0);
        for j in space.valid(0b01) {
            if *j as usize != encode_joint(&[Action::Stay, Action::Up]) {
                q.set(StateKey(2), *j as usize, -20.0);
            }
        }
        cql_update(&mut q, StateKey(1), 0, 0.0, StateKey(2), space.valid(0b01), false, &P).unwrap();
        assert!((q.get(StateKey(1), 0) - 0.25 * 0.9 * -10.0).abs() < 1e-12);
    }

    #[test]
    fn single_member_matches_iql() {
        let space = JointSpace::new(1).unwrap();
        let mut iq = QTable::new(5);
        let mut cq = QTable::new(5);
        let mut r1 = ChaCha8Rng::seed_from_u64(77);
        let mut r2 = ChaCha8Rng::seed_from_u64(77);
        let mut stream = ChaCha8Rng::seed_from_u64(1);
        for step in 0..5_000u64 {
            let s = StateKey(stream.gen_range(0..20));
            let eps = if step % 3 == 0 { 0.0 } else { 0.3 };
            let a = iql_select(&iq, s, eps, &mut r1);
            let j = cql_select_joint(&cq, s, &space, 0, eps, &mut r2);
            assert_eq!(a.index(), j);
            let r: f64 = stream.gen_range(-5.0..5.0);
            let s2 = StateKey(stream.gen_range(0..20));
            let term = stream.gen_bool(0.1);
            iql_update(&mut iq, s, a, r, s2, term, &P).unwrap();
            cql_update(&mut cq, s, j, r, s2, space.valid(0), term, &P).unwrap();
        }
        assert_eq!(iq.sorted_rows(), cq.sorted_rows());
    }

    #[test]
    fn marginal_examples() {
        // two listed actions per member: a1=Up, a2=Down for member 0; b1=Up, b2=Down for member 1
        let mut q = QTable::new(25);
        let s = StateKey(9);
        q.set(s, encode_joint(&[Action::Up, Action::Up]), 1.0);
        q.set(s, encode_joint(&[Action::Up, Action::Down]), 3.0);
        q.set(s, encode_joint(&[Action::Down, Action::Up]), 0.0);
        q.set(s, encode_joint(&[Action::Down, Action::Down]), 2.0);
        let two: &[u32] = &[0, 1];
        let m = marginalize_with_support(&q, s, 0, &[two, two]);
        assert_eq!((m[0], m[1]), (2.0, 1.0));

        let mut c = QTable::new(25);
        for j in 0..25 {
            c.set(s, j, 4.5);
        }
        assert_eq!(marginalize(&c, s, 2, 1), [4.5; 5]);

        let mut single = QTable::new(5);
        for (a, v) in [1.0, -2.0, 0.5, 7.0, 3.0].into_iter().enumerate() {
            single.set(s, a, v);
        }
        assert_eq!(marginalize(&single, s, 1, 0), [1.0, -2.0, 0.5, 7.0, 3.0]);
        assert_eq!(marginalize(&single, StateKey(0), 1, 0), [0.0; 5]);
    }

    #[test]
    fn marginal_greedy_uses_own_component() {
        let mut learner = CentralizedLearner::new(2).unwrap();
        let s = StateKey(4);
        for b in Action::ALL {
            learner.table.set(s, encode_joint(&[Action::Left, b]), 2.0);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(learner.marginal_greedy(s, 0, 0, &mut rng), Action::Left);
    }
}
