//! Deployment realizations and the SIR seen by the typical primary or
//! secondary receiver, for every antenna regime.
//!
//! Two evaluation paths are provided. [`realize`] builds a fully explicit
//! realization — every fading channel, beamformer and combiner — and
//! [`sir_primary`] / [`sir_secondary`] evaluate the SIR from it. The
//! [`fast`] submodule samples the same SIR laws directly, replacing each
//! interferer's beamformed fading gain by the exponential / gamma law it
//! provably follows; the harness uses the fast path for large trial counts
//! and the test suite checks the two paths against each other
//! distributionally.

pub mod fast;

use rand::Rng;

use crate::channel::{
    cancelation_null_space, dot_h, dot_row, draw_cn, draw_gaussian_matrix, draw_gaussian_vector,
    null_space_basis, receive_combiner, transmit_beamformer, Beamformer, CMat, CVec, Combiner,
};
use crate::error::{Error, Result};
use crate::geometry::{
    displace_receivers, sample_ppp, NeighborGrid, Network, Point2, PointSample, Region,
};
use crate::scenario::{CanceledMode, Regime, ScenarioConfig};

/// d^(-alpha) from a squared distance, with cheap paths for the common
/// simulation exponents.
#[inline]
pub(crate) fn pathloss_from_sq(dist_sq: f64, alpha: f64) -> f64 {
    if alpha == 4.0 {
        1.0 / (dist_sq * dist_sq)
    } else if alpha == 3.0 {
        1.0 / (dist_sq * dist_sq.sqrt())
    } else {
        dist_sq.powf(-alpha * 0.5)
    }
}

/// SIR at a typical receiver, with its additive pieces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirOutcome {
    /// signal / (primary + secondary interference); `f64::INFINITY` when the
    /// realization has no interferers (counts as non-outage).
    pub sir: f64,
    pub signal: f64,
    pub primary_interference: f64,
    pub secondary_interference: f64,
    /// Number of nearest secondary interferers canceled at the typical
    /// primary receiver (primary probe only).
    pub canceled_count: Option<u32>,
}

impl SirOutcome {
    fn assemble(signal: f64, primary: f64, secondary: f64, canceled: Option<u32>) -> SirOutcome {
        let denom = primary + secondary;
        let sir = if denom > 0.0 { signal / denom } else { f64::INFINITY };
        SirOutcome {
            sir,
            signal,
            primary_interference: primary,
            secondary_interference: secondary,
            canceled_count: canceled,
        }
    }
}

/// The probe pair of a realization: receiver at the origin, transmitter at
/// the configured link distance in a random direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypicalPair {
    pub network: Network,
    pub tx: Point2,
    pub rx: Point2,
}

/// Channels from every field transmitter to the typical receiver.
#[derive(Debug, Clone)]
pub enum ProbeLinks {
    /// Typical receiver is a primary receiver: scalar channels from primary
    /// transmitters, 1 x N rows from secondary transmitters.
    Primary { own_gain: f64, primary_gains: Vec<f64>, secondary_rows: Vec<CVec> },
    /// Typical receiver is a secondary receiver: M x 1 columns from primary
    /// transmitters, M x N matrices from secondary transmitters.
    Secondary { own_channel: CMat, primary_cols: Vec<CVec>, secondary_mats: Vec<CMat> },
}

/// A fully constructed deployment: point fields with pairings, all channels
/// to the typical receiver, per-transmitter beamformers with their nulling
/// targets, and the receive-side cancelation state.
#[derive(Debug, Clone)]
pub struct DeploymentRealization {
    pub config: ScenarioConfig,
    pub regime: Regime,
    pub region: Region,
    pub typical: TypicalPair,
    /// Field transmitters (the typical transmitter is not among them).
    pub primary: PointSample,
    pub secondary: PointSample,
    /// Primary receiver positions targetable by secondary nulling; when the
    /// probe is primary, index 0 is the typical receiver at the origin.
    pub primary_receivers: Vec<Point2>,
    /// Index of the typical receiver inside `primary_receivers`, if present.
    pub typical_rx_index: Option<usize>,
    /// Per secondary transmitter: indices of its nulling targets within
    /// `primary_receivers` (its k nearest).
    pub nulling_targets: Vec<Vec<usize>>,
    /// Per secondary transmitter: its unit-norm transmit beamformer.
    pub beamformers: Vec<Beamformer>,
    pub links: ProbeLinks,
    /// Beamformer of the typical secondary transmitter (secondary probe).
    pub typical_beamformer: Option<Beamformer>,
    /// Union interferers canceled at the typical secondary receiver, as
    /// (network, field index), the m nearest to the origin.
    pub cancelation_set: Vec<(Network, usize)>,
    /// Receive combiner of the typical secondary receiver (multi-antenna
    /// receive regime).
    pub combiner: Option<Combiner>,
}

fn typical_pair<R: Rng>(network: Network, distance: f64, rng: &mut R) -> TypicalPair {
    let phi = std::f64::consts::TAU * rng.random::<f64>();
    TypicalPair {
        network,
        tx: Point2::new(distance * phi.cos(), distance * phi.sin()),
        rx: Point2::ORIGIN,
    }
}

/// Null space and beamformer for one secondary transmitter, with fresh
/// constraint channels toward `target_count` primary receivers.
///
/// Transmit-only nulling beamforms the leftover dimensions on the own
/// channel. When every spare DOF is pinned on nulling (multi-antenna receive
/// regime) the beamformer is the null-space direction itself, independent of
/// the own channel matrix; leftover dimensions in short realizations stay
/// unshaped.
fn build_beamformer(
    regime: Regime,
    n_tx: usize,
    own_row: &CVec,
    constraint_rows: Vec<CVec>,
) -> Result<Beamformer> {
    let ns = null_space_basis(n_tx, &constraint_rows)?;
    match regime {
        Regime::Mimo => {
            let vector = ns.basis.col(0);
            let signal_gain = dot_row(own_row, &vector).norm_sqr();
            Ok(Beamformer { vector, nulled_targets: ns.constraints, signal_gain })
        }
        _ => transmit_beamformer(own_row, &ns),
    }
}

fn fresh_constraints<R: Rng>(n_tx: usize, count: usize, rng: &mut R) -> Vec<CVec> {
    (0..count).map(|_| draw_gaussian_vector(n_tx, rng)).collect()
}

/// Build a complete realization of the deployment for one trial.
///
/// `probe` selects which network's typical pair sits at the origin; the
/// outage experiments at the primary and the secondary receiver are separate
/// conditionings and use separate realizations. `Baseline` forces a primary
/// probe and omits the secondary network entirely.
pub fn realize<R: Rng>(
    config: &ScenarioConfig,
    region: Region,
    regime: Regime,
    probe: Network,
    rng: &mut R,
) -> Result<DeploymentRealization> {
    config.validate_for(regime)?;
    if regime == Regime::Baseline && probe == Network::Secondary {
        return Err(Error::InvalidParameter(
            "baseline regime has no secondary network to probe".into(),
        ));
    }
    let k = config.effective_k(regime);
    let m = config.effective_m(regime);

    let primary_raw = sample_ppp(config.lambda_p, region, Network::Primary, rng)?;
    let primary = displace_receivers(&primary_raw, config.d_p, rng)?;
    let secondary = if regime == Regime::Baseline {
        PointSample::empty(region, Network::Secondary)
    } else {
        let raw = sample_ppp(config.lambda_s, region, Network::Secondary, rng)?;
        displace_receivers(&raw, config.d_s, rng)?
    };

    let link_distance = match probe {
        Network::Primary => config.d_p,
        Network::Secondary => config.d_s,
    };
    let typical = typical_pair(probe, link_distance, rng);

    let mut primary_receivers: Vec<Point2> = Vec::with_capacity(primary.len() + 1);
    let typical_rx_index = if probe == Network::Primary {
        primary_receivers.push(typical.rx);
        Some(0)
    } else {
        None
    };
    primary_receivers.extend(primary.receiver_positions());

    // Nulling targets: each secondary transmitter aims at its k nearest
    // primary receivers (fewer when the realization is short of receivers).
    let grid = NeighborGrid::build(&primary_receivers);
    let nulling_targets: Vec<Vec<usize>> = secondary
        .points
        .iter()
        .map(|pt| grid.k_nearest(pt.pos, k).iter().map(|n| n.index).collect())
        .collect();

    // Channels into the typical receiver, and one beamformer per secondary
    // transmitter. When a transmitter targets the typical primary receiver,
    // the channel row toward the probe is one of the rows its beamformer
    // annihilates.
    let mut beamformers = Vec::with_capacity(secondary.len());
    let links = match probe {
        Network::Primary => {
            let own_gain = draw_cn(rng).norm_sqr();
            let primary_gains = (0..primary.len()).map(|_| draw_cn(rng).norm_sqr()).collect();
            let mut secondary_rows = Vec::with_capacity(secondary.len());
            for targets in &nulling_targets {
                let row = draw_gaussian_vector(config.n_tx, rng);
                let mut rows = fresh_constraints(config.n_tx, targets.len(), rng);
                if targets.contains(&0) && typical_rx_index == Some(0) {
                    rows[0] = row.clone();
                }
                let own_row = draw_gaussian_vector(config.n_tx, rng);
                beamformers.push(build_beamformer(regime, config.n_tx, &own_row, rows)?);
                secondary_rows.push(row);
            }
            ProbeLinks::Primary { own_gain, primary_gains, secondary_rows }
        }
        Network::Secondary => {
            let own_channel = draw_gaussian_matrix(config.m_rx, config.n_tx, rng)?;
            let primary_cols =
                (0..primary.len()).map(|_| draw_gaussian_vector(config.m_rx, rng)).collect();
            let secondary_mats = (0..secondary.len())
                .map(|_| draw_gaussian_matrix(config.m_rx, config.n_tx, rng))
                .collect::<Result<Vec<_>>>()?;
            for targets in &nulling_targets {
                let rows = fresh_constraints(config.n_tx, targets.len(), rng);
                let own_row = draw_gaussian_vector(config.n_tx, rng);
                beamformers.push(build_beamformer(regime, config.n_tx, &own_row, rows)?);
            }
            ProbeLinks::Secondary { own_channel, primary_cols, secondary_mats }
        }
    };

    // Typical secondary transmitter's own beamformer: nulls toward its k
    // nearest primary receivers, beamforms on its own channel.
    let typical_beamformer = if probe == Network::Secondary {
        let targets = grid.k_nearest(typical.tx, k).len();
        let own_channel = match &links {
            ProbeLinks::Secondary { own_channel, .. } => own_channel,
            _ => unreachable!(),
        };
        // Reference row for the projection: the channel row seen by the
        // receive side (row 0); with a single receive antenna this is
        // exactly the own channel q00.
        let own_row: CVec = own_channel.row(0).to_vec();
        let rows = fresh_constraints(config.n_tx, targets, rng);
        Some(build_beamformer(regime, config.n_tx, &own_row, rows)?)
    } else {
        None
    };

    // Receive-side cancelation at the typical secondary receiver: the m
    // nearest interferers out of the union of both fields.
    let mut cancelation_set = Vec::new();
    let mut combiner = None;
    if probe == Network::Secondary {
        if m > 0 {
            let mut union: Vec<(f64, Network, usize)> = Vec::new();
            for (i, p) in primary.points.iter().enumerate() {
                union.push((p.pos.dist_sq(&Point2::ORIGIN), Network::Primary, i));
            }
            for (i, p) in secondary.points.iter().enumerate() {
                union.push((p.pos.dist_sq(&Point2::ORIGIN), Network::Secondary, i));
            }
            union.sort_by(|a, b| a.0.total_cmp(&b.0));
            cancelation_set =
                union.iter().take(m).map(|&(_, net, i)| (net, i)).collect();
        }
        if config.m_rx > 1 {
            let (own_channel, primary_cols, secondary_mats) = match &links {
                ProbeLinks::Secondary { own_channel, primary_cols, secondary_mats } => {
                    (own_channel, primary_cols, secondary_mats)
                }
                _ => unreachable!(),
            };
            let u0 = typical_beamformer.as_ref().expect("secondary probe has a beamformer");
            let effective_signal = own_channel.mul_vec(&u0.vector)?;
            let canceled: Vec<CVec> = cancelation_set
                .iter()
                .map(|&(net, i)| match net {
                    Network::Primary => Ok(primary_cols[i].clone()),
                    Network::Secondary => secondary_mats[i].mul_vec(&beamformers[i].vector),
                })
                .collect::<Result<Vec<_>>>()?;
            let ns = cancelation_null_space(config.m_rx, &canceled)?;
            combiner = Some(receive_combiner(&effective_signal, &ns)?);
        }
    }

    Ok(DeploymentRealization {
        config: *config,
        regime,
        region,
        typical,
        primary,
        secondary,
        primary_receivers,
        typical_rx_index,
        nulling_targets,
        beamformers,
        links,
        typical_beamformer,
        cancelation_set,
        combiner,
    })
}

/// Number of nearest secondary interferers whose contribution is removed at
/// the given primary receiver.
///
/// `Prefix` returns the largest c such that each of the c nearest secondary
/// transmitters to this receiver targets it; `ExactSet` counts every
/// targeting transmitter regardless of rank.
pub fn canceled_count(
    primary_rx: Point2,
    real: &DeploymentRealization,
    mode: CanceledMode,
) -> Result<u32> {
    let rx_index = real
        .primary_receivers
        .iter()
        .position(|p| p.dist(&primary_rx) < 1e-6)
        .ok_or_else(|| {
            Error::InvalidParameter(format!(
                "({}, {}) is not a primary receiver of this realization",
                primary_rx.x, primary_rx.y
            ))
        })?;
    let targeting: Vec<bool> = real
        .nulling_targets
        .iter()
        .map(|targets| targets.contains(&rx_index))
        .collect();
    match mode {
        CanceledMode::ExactSet => Ok(targeting.iter().filter(|&&t| t).count() as u32),
        CanceledMode::Prefix => {
            let mut order: Vec<(f64, usize)> = real
                .secondary
                .points
                .iter()
                .enumerate()
                .map(|(i, p)| (p.pos.dist_sq(&primary_rx), i))
                .collect();
            order.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut c = 0u32;
            for (_, i) in order {
                if targeting[i] {
                    c += 1;
                } else {
                    break;
                }
            }
            Ok(c)
        }
    }
}

/// SIR at the typical primary receiver.
///
/// In `ExactSet` mode every secondary gain is the literal beamformed fading
/// power (targeting transmitters contribute their numerically-null
/// residual); in `Prefix` mode the maximal targeting prefix is excluded and
/// the rest keep their numerical gains.
pub fn sir_primary(real: &DeploymentRealization) -> Result<SirOutcome> {
    let (own_gain, primary_gains, secondary_rows) = match &real.links {
        ProbeLinks::Primary { own_gain, primary_gains, secondary_rows } => {
            (own_gain, primary_gains, secondary_rows)
        }
        _ => {
            return Err(Error::InvalidParameter(
                "realization has no typical primary pair".into(),
            ))
        }
    };
    let cfg = &real.config;
    let alpha = cfg.alpha;
    let signal = cfg.p_p * pathloss_from_sq(cfg.d_p * cfg.d_p, alpha) * own_gain;

    let mut i_pp = 0.0;
    for (p, gain) in real.primary.points.iter().zip(primary_gains.iter()) {
        i_pp += cfg.p_p * pathloss_from_sq(p.pos.dist_sq(&Point2::ORIGIN), alpha) * gain;
    }

    let prefix_c = canceled_count(Point2::ORIGIN, real, CanceledMode::Prefix)?;
    let exact_c = canceled_count(Point2::ORIGIN, real, CanceledMode::ExactSet)?;
    let excluded_prefix: Vec<bool> = if cfg.canceled_mode == CanceledMode::Prefix {
        let mut order: Vec<(f64, usize)> = real
            .secondary
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.pos.dist_sq(&Point2::ORIGIN), i))
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut mask = vec![false; real.secondary.len()];
        for &(_, i) in order.iter().take(prefix_c as usize) {
            mask[i] = true;
        }
        mask
    } else {
        vec![false; real.secondary.len()]
    };

    let mut i_sp = 0.0;
    for (i, (p, row)) in real.secondary.points.iter().zip(secondary_rows.iter()).enumerate() {
        if excluded_prefix[i] {
            continue;
        }
        let gain = dot_row(row, &real.beamformers[i].vector).norm_sqr();
        i_sp += cfg.p_s * pathloss_from_sq(p.pos.dist_sq(&Point2::ORIGIN), alpha) * gain;
    }

    let canceled = match cfg.canceled_mode {
        CanceledMode::Prefix => prefix_c,
        CanceledMode::ExactSet => exact_c,
    };
    Ok(SirOutcome::assemble(signal, i_pp, i_sp, Some(canceled)))
}

/// SIR at the typical secondary receiver.
pub fn sir_secondary(real: &DeploymentRealization) -> Result<SirOutcome> {
    let (own_channel, primary_cols, secondary_mats) = match &real.links {
        ProbeLinks::Secondary { own_channel, primary_cols, secondary_mats } => {
            (own_channel, primary_cols, secondary_mats)
        }
        _ => {
            return Err(Error::InvalidParameter(
                "realization has no typical secondary pair".into(),
            ))
        }
    };
    let cfg = &real.config;
    let alpha = cfg.alpha;
    let u0 = real.typical_beamformer.as_ref().expect("secondary probe has a beamformer");

    let effective = own_channel.mul_vec(&u0.vector)?;
    let numerator_gain = match &real.combiner {
        Some(t0) => dot_h(&t0.vector, &effective).norm_sqr(),
        None => effective[0].norm_sqr(),
    };
    let signal = cfg.p_s * pathloss_from_sq(cfg.d_s * cfg.d_s, alpha) * numerator_gain;

    let mut i_ps = 0.0;
    for (p, col) in real.primary.points.iter().zip(primary_cols.iter()) {
        let gain = match &real.combiner {
            Some(t0) => dot_h(&t0.vector, col).norm_sqr(),
            None => col[0].norm_sqr(),
        };
        i_ps += cfg.p_p * pathloss_from_sq(p.pos.dist_sq(&Point2::ORIGIN), alpha) * gain;
    }

    let mut i_ss = 0.0;
    for (i, (p, mat)) in real.secondary.points.iter().zip(secondary_mats.iter()).enumerate() {
        let through = mat.mul_vec(&real.beamformers[i].vector)?;
        let gain = match &real.combiner {
            Some(t0) => dot_h(&t0.vector, &through).norm_sqr(),
            None => through[0].norm_sqr(),
        };
        i_ss += cfg.p_s * pathloss_from_sq(p.pos.dist_sq(&Point2::ORIGIN), alpha) * gain;
    }

    Ok(SirOutcome::assemble(signal, i_ps, i_ss, None))
}

/// Brute-force check helper: the m nearest union interferers to the origin
/// (network, field index), via exhaustive sort.
pub fn union_nearest_to_origin(real: &DeploymentRealization, m: usize) -> Vec<(Network, usize)> {
    let mut all: Vec<(f64, usize)> = real
        .primary
        .positions()
        .chain(real.secondary.positions())
        .enumerate()
        .map(|(i, p)| (p.dist_sq(&Point2::ORIGIN), i))
        .collect();
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    all.into_iter()
        .take(m)
        .map(|(_, i)| {
            if i < real.primary.len() {
                (Network::Primary, i)
            } else {
                (Network::Secondary, i - real.primary.len())
            }
        })
        .collect()
}
