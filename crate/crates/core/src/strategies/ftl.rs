//! Follow-the-leader: replay the best constant bet on past log-wealth.
//!
//! No regularization, so the bet can reach 0 or 1 and a later observation
//! can ruin the process. Ruin is absorbed by the ledger.

use crate::problems::Observation;
use crate::wealth::{Bet, EValuePair, HindsightTracker};

use super::Strategy;

#[derive(Debug, Clone)]
pub struct FtlState {
    tracker: HindsightTracker,
    default_bet: Bet,
}

impl Default for FtlState {
    fn default() -> Self {
        Self::new(Bet::HALF)
    }
}

impl FtlState {
    pub fn new(default_bet: Bet) -> Self {
        Self {
            tracker: HindsightTracker::new(),
            default_bet,
        }
    }

    pub fn bet(&self) -> Bet {
        if self.tracker.n() == 0 {
            self.default_bet
        } else {
            self.tracker.current().bet
        }
    }

    pub fn update(&mut self, pair: EValuePair) {
        self.tracker.observe(pair);
    }

    pub fn tracker(&self) -> &HindsightTracker {
        &self.tracker
    }
}

impl Strategy for FtlState {
    fn bet(&self) -> Bet {
        FtlState::bet(self)
    }

    fn update(&mut self, obs: &Observation) -> crate::Result<()> {
        FtlState::update(self, obs.pair);
        Ok(())
    }
}
