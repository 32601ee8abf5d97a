//! Dashboard: a probe table realizing a degree-weighted distribution over
//! the frontier that supports O(deg) insertion and removal.
//!
//! Every frontier node owns `deg(v)` consecutive pins in `db`, each pin
//! naming the node's tile. Popping probes `db` uniformly until it hits a
//! pin, which selects a node with probability proportional to its degree.
//! Removed nodes leave null pins behind; new nodes are appended. When the
//! table runs out of room the live nodes are compacted to the front using
//! the index array (IA): `ia_start[j]` is the first pin of the `j`-th node
//! added and `ia_live[j]` whether it is still in the frontier.

use rand::Rng;

use crate::graph::Graph;
use crate::{Error, Result};

/// Null pin marker.
pub const NULL_PIN: u32 = u32::MAX;

/// Index of a tile in the dashboard's tile store.
pub type TileRef = usize;

/// Per-node metadata shared by all pins of one frontier node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tile {
    pub node: u32,
    pub pin_start: usize,
    pub pin_end: usize,
    pub ia_index: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dashboard {
    db: Vec<u32>,
    ia_start: Vec<usize>,
    ia_live: Vec<bool>,
    tiles: Vec<Tile>,
    count: usize,
    used: usize,
    live_pins: usize,
    probes: u64,
}

/// Table size `ceil(eta * m * d)` with `d = ceil(|E| / |V|)`.
pub fn dashboard_capacity(g: &Graph, m: usize, eta: f64) -> usize {
    let d = g.num_edges().div_ceil(g.num_nodes().max(1)).max(1);
    (eta * m as f64 * d as f64).ceil() as usize
}

/// Builds the dashboard for an initial frontier with the standard capacity.
pub fn init_dashboard(g: &Graph, frontier: &[u32], eta: f64) -> Result<Dashboard> {
    if !(eta > 1.0) {
        return Err(Error::Config(format!("enlargement factor must exceed 1, got {eta}")));
    }
    Dashboard::with_capacity(g, frontier, dashboard_capacity(g, frontier.len(), eta))
}

impl Dashboard {
    pub fn with_capacity(g: &Graph, frontier: &[u32], capacity: usize) -> Result<Dashboard> {
        let total: usize = frontier.iter().map(|&v| g.degree(v as usize)).sum();
        if total > capacity {
            return Err(Error::Config(format!(
                "initial frontier needs {total} pins but the dashboard holds {capacity}; raise eta"
            )));
        }
        if frontier.len() > capacity {
            return Err(Error::Config(format!(
                "frontier of {} nodes exceeds dashboard capacity {capacity}",
                frontier.len()
            )));
        }
        let mut db = Dashboard {
            db: vec![NULL_PIN; capacity],
            ia_start: vec![0; capacity + 1],
            ia_live: vec![false; capacity + 1],
            tiles: Vec::with_capacity(frontier.len()),
            count: 0,
            used: 0,
            live_pins: 0,
            probes: 0,
        };
        for &v in frontier {
            let tile = db.tiles.len();
            db.tiles.push(Tile {
                node: v,
                pin_start: 0,
                pin_end: 0,
                ia_index: 0,
            });
            db.add_to_frontier(g, v, tile);
        }
        Ok(db)
    }

    pub fn capacity(&self) -> usize {
        self.db.len()
    }

    /// Occupied DB entries (live or historical).
    pub fn used(&self) -> usize {
        self.used
    }

    /// Nodes added since the last cleanup.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn live_pins(&self) -> usize {
        self.live_pins
    }

    pub fn remaining(&self) -> usize {
        self.capacity() - self.used
    }

    /// Cumulative start offsets of columns `0..=count`.
    pub fn ia_starts(&self) -> &[usize] {
        &self.ia_start[..=self.count]
    }

    pub fn ia_live(&self) -> &[bool] {
        &self.ia_live[..self.count]
    }

    pub fn pins(&self) -> &[u32] {
        &self.db
    }

    pub fn tile(&self, t: TileRef) -> &Tile {
        &self.tiles[t]
    }

    /// Total probes issued by [`Dashboard::pop_frontier`].
    pub fn probes(&self) -> u64 {
        self.probes
    }

    /// Live `(node, pins)` pairs in insertion order.
    pub fn live_nodes(&self) -> Vec<(u32, usize)> {
        (0..self.count)
            .filter(|&j| self.ia_live[j])
            .map(|j| {
                let start = self.ia_start[j];
                let width = self.ia_start[j + 1] - start;
                let node = if width > 0 {
                    self.tiles[self.db[start] as usize].node
                } else {
                    self.tiles.iter().find(|t| t.ia_index == j).map_or(u32::MAX, |t| t.node)
                };
                (node, width)
            })
            .collect()
    }

    /// Whether adding a node of degree `deg` needs a cleanup first.
    pub fn needs_cleanup(&self, deg: usize) -> bool {
        deg > self.remaining() || self.count >= self.capacity()
    }

    /// Removes a node chosen with probability proportional to its pin count.
    pub fn pop_frontier<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<(u32, TileRef)> {
        if self.live_pins == 0 {
            return Err(Error::Sampler("dashboard has no live pins".into()));
        }
        let cap = self.capacity();
        let pin = loop {
            self.probes += 1;
            let p = self.db[rng.random_range(0..cap)];
            if p != NULL_PIN {
                break p as usize;
            }
        };
        let tile = self.tiles[pin];
        self.db[tile.pin_start..tile.pin_end].fill(NULL_PIN);
        self.ia_live[tile.ia_index] = false;
        self.live_pins -= tile.pin_end - tile.pin_start;
        Ok((tile.node, pin))
    }

    /// Appends `v_new` as column `count`, reusing tile `tile`.
    ///
    /// If fewer than `deg(v_new)` entries remain the node receives all the
    /// remaining ones. The caller is expected to clean up beforehand when
    /// [`Dashboard::needs_cleanup`] says so.
    pub fn add_to_frontier(&mut self, g: &Graph, v_new: u32, tile: TileRef) {
        let i = self.count;
        assert!(i < self.capacity(), "index array is full; cleanup first");
        let start = self.ia_start[i];
        let width = g.degree(v_new as usize).min(self.capacity() - start);
        self.ia_start[i + 1] = start + width;
        self.ia_live[i] = true;
        self.tiles[tile] = Tile {
            node: v_new,
            pin_start: start,
            pin_end: start + width,
            ia_index: i,
        };
        self.db[start..start + width].fill(tile as u32);
        self.count += 1;
        self.used = start + width;
        self.live_pins += width;
    }

    /// A fresh dashboard holding only the live nodes, compacted to the front
    /// in their original order.
    pub fn cleanup(&self) -> Dashboard {
        let cap = self.capacity();
        let mut next = Dashboard {
            db: vec![NULL_PIN; cap],
            ia_start: vec![0; cap + 1],
            ia_live: vec![false; cap + 1],
            tiles: self.tiles.clone(),
            count: 0,
            used: 0,
            live_pins: self.live_pins,
            probes: self.probes,
        };
        // live tiles keyed by IA column so zero-width nodes survive too
        let mut by_column: Vec<Option<TileRef>> = vec![None; self.count];
        for (t, tile) in self.tiles.iter().enumerate() {
            if tile.ia_index < self.count && self.ia_live[tile.ia_index] {
                by_column[tile.ia_index] = Some(t);
            }
        }
        let mut offset = 0;
        for t in by_column.into_iter().flatten() {
            let old = self.tiles[t];
            let width = old.pin_end - old.pin_start;
            let j = next.count;
            next.db[offset..offset + width].copy_from_slice(&self.db[old.pin_start..old.pin_end]);
            next.ia_start[j] = offset;
            next.ia_live[j] = true;
            next.tiles[t] = Tile {
                node: old.node,
                pin_start: offset,
                pin_end: offset + width,
                ia_index: j,
            };
            offset += width;
            next.count += 1;
            next.ia_start[next.count] = offset;
        }
        next.used = offset;
        next
    }
}
