use std::fmt;

use serde::{Deserialize, Serialize};

/// A grid coordinate. `x` grows to the right, `y` grows downward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: u16,
    pub y: u16,
}

impl Cell {
    pub const fn new(x: u16, y: u16) -> Self {
        Cell { x, y }
    }

    /// Neighbouring cell in `action`'s direction, or `None` when it would leave
    /// a `width` x `height` grid.
    pub fn offset(self, action: Action, width: u16, height: u16) -> Option<Cell> {
        let Cell { x, y } = self;
        match action {
            Action::Up => y.checked_sub(1).map(|y| Cell { x, y }),
            Action::Down => (y + 1 < height).then_some(Cell { x, y: y + 1 }),
            Action::Left => x.checked_sub(1).map(|x| Cell { x, y }),
            Action::Right => (x + 1 < width).then_some(Cell { x: x + 1, y }),
            Action::Stay => Some(self),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Grid (L1) distance between two cells.
pub fn manhattan_distance(p: Cell, q: Cell) -> u32 {
    u32::from(p.x.abs_diff(q.x)) + u32::from(p.y.abs_diff(q.y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Team {
    Predator,
    Prey,
}

impl Team {
    pub fn opponent(self) -> Team {
        match self {
            Team::Predator => Team::Prey,
            Team::Prey => Team::Predator,
        }
    }
}

/// Per-agent primitive action. The declaration order is the canonical index
/// order used for table columns, joint-action digits and tie-breaking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum Action {
    Up = 0,
    Down = 1,
    Left = 2,
    Right = 3,
    Stay = 4,
}

impl Action {
    pub const COUNT: usize = 5;
    pub const ALL: [Action; Action::COUNT] =
        [Action::Up, Action::Down, Action::Left, Action::Right, Action::Stay];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    /// Inverse of [`Action::index`].
    #[inline]
    pub fn from_index(index: usize) -> Option<Action> {
        Action::ALL.get(index).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AgentState {
    pub id: usize,
    pub team: Team,
    pub position: Cell,
    pub stamina: u32,
    /// Cells per timestep: 1 (base) or 2 (double).
    pub speed: u8,
    pub alive: bool,
}

/// Full joint state. Agents are ordered by id; predators come first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WorldState {
    pub agents: Vec<AgentState>,
    pub timestep: u32,
}

impl WorldState {
    pub fn team(&self, team: Team) -> impl Iterator<Item = &AgentState> {
        self.agents.iter().filter(move |a| a.team == team)
    }

    pub fn alive_count(&self, team: Team) -> usize {
        self.team(team).filter(|a| a.alive).count()
    }

    /// Id of the alive agent standing on `cell`, if any.
    pub fn occupant(&self, cell: Cell) -> Option<usize> {
        self.agents
            .iter()
            .find(|a| a.alive && a.position == cell)
            .map(|a| a.id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manhattan_examples() {
        assert_eq!(manhattan_distance(Cell::new(0, 0), Cell::new(0, 0)), 0);
        assert_eq!(manhattan_distance(Cell::new(0, 0), Cell::new(3, 4)), 7);
        assert_eq!(manhattan_distance(Cell::new(7, 7), Cell::new(0, 0)), 14);
    }

    #[test]
    fn offsets_respect_bounds() {
        let c = Cell::new(0, 0);
        assert_eq!(c.offset(Action::Up, 8, 8), None);
        assert_eq!(c.offset(Action::Left, 8, 8), None);
        assert_eq!(c.offset(Action::Right, 8, 8), Some(Cell::new(1, 0)));
        assert_eq!(c.offset(Action::Down, 8, 8), Some(Cell::new(0, 1)));
        assert_eq!(Cell::new(7, 7).offset(Action::Down, 8, 8), None);
        assert_eq!(c.offset(Action::Stay, 8, 8), Some(c));
    }

    #[test]
    fn action_index_roundtrip() {
        for (i, a) in Action::ALL.iter().enumerate() {
            assert_eq!(a.index(), i);
            assert_eq!(Action::from_index(i), Some(*a));
        }
        assert_eq!(Action::from_index(5), None);
    }
}
