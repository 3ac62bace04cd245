//! Genetic algorithm over the six ASF weights.
//!
//! Individuals are 288-bit strings: six 48-bit genes read big-endian as
//! unsigned integers, then normalized onto the unit simplex by [`repair`].
//! Fitness is the performance of a full simulation run under the repaired
//! weights. Selection is roulette-wheel, crossover is double-point, and each
//! generation is replaced wholesale apart from a small elite.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::WorldState;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream_rng, SimRng, Stream};
use crate::selection::WeightVector;
use crate::simulation::{self, SimulationConfig, SimulationMode};

pub const GENES: usize = 6;
pub const BITS_PER_GENE: usize = 48;
pub const GENOME_BITS: usize = GENES * BITS_PER_GENE;
pub const GENE_MAX: u64 = (1 << BITS_PER_GENE) - 1;

const ROULETTE_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Genotype {
    genes: [u64; GENES],
}

impl Genotype {
    pub fn zeros() -> Self {
        Self { genes: [0; GENES] }
    }

    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let mut genes = [0; GENES];
        for g in &mut genes {
            *g = rng.gen::<u64>() & GENE_MAX;
        }
        Self { genes }
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        if bits.len() != GENOME_BITS {
            return Err(Error::config(format!("genotype must have {GENOME_BITS} bits, got {}", bits.len())));
        }
        let mut g = Self::zeros();
        for (i, &b) in bits.iter().enumerate() {
            if b {
                g.flip(i);
            }
        }
        Ok(g)
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..GENOME_BITS).map(|i| self.bit(i)).collect()
    }

    fn mask(index: usize) -> (usize, u64) {
        let gene = index / BITS_PER_GENE;
        let offset = index % BITS_PER_GENE;
        (gene, 1u64 << (BITS_PER_GENE - 1 - offset))
    }

    /// Bit `index`, counting from the most significant bit of the first gene.
    pub fn bit(&self, index: usize) -> bool {
        let (gene, mask) = Self::mask(index);
        self.genes[gene] & mask != 0
    }

    pub fn flip(&mut self, index: usize) {
        let (gene, mask) = Self::mask(index);
        self.genes[gene] ^= mask;
    }

    fn set(&mut self, index: usize, value: bool) {
        if self.bit(index) != value {
            self.flip(index);
        }
    }
}

/// Six decoded integers, each in `[0, 2^48 - 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Phenotype(pub [u64; GENES]);

pub fn decode(g: &Genotype) -> Phenotype {
    Phenotype(g.genes)
}

pub fn encode(p: &Phenotype) -> Result<Genotype> {
    if let Some(v) = p.0.iter().find(|&&v| v > GENE_MAX) {
        return Err(Error::config(format!("gene value {v} does not fit in {BITS_PER_GENE} bits")));
    }
    Ok(Genotype { genes: p.0 })
}

/// Divides each integer by their sum. The all-zero phenotype maps to uniform weights.
pub fn repair(p: &Phenotype) -> WeightVector {
    // Sums of six 48-bit values stay below 2^51, so the f64 arithmetic is exact
    // up to the final division.
    let sum: f64 = p.0.iter().map(|&v| v as f64).sum();
    if sum == 0.0 {
        return WeightVector::uniform();
    }
    let mut w = [0.0; GENES];
    for (wi, &v) in w.iter_mut().zip(p.0.iter()) {
        *wi = v as f64 / sum;
    }
    WeightVector::new(w).expect("normalized weights lie on the simplex")
}

/// Performance of one simulation run using the genotype's repaired weights.
pub fn fitness(g: &Genotype, world: &WorldState, sim_config: &SimulationConfig, seed: u64) -> Result<f64> {
    let config = SimulationConfig {
        mode: SimulationMode::Asf,
        weights: Some(repair(&decode(g))),
        ..sim_config.clone()
    };
    Ok(simulation::simulate(world.clone(), &config, seed)?.performance)
}

/// Swaps bits in `[lo, hi)` between the two parents.
pub fn crossover_at(a: &Genotype, b: &Genotype, lo: usize, hi: usize) -> (Genotype, Genotype) {
    let (mut c1, mut c2) = (*a, *b);
    for i in lo..hi.min(GENOME_BITS) {
        c1.set(i, b.bit(i));
        c2.set(i, a.bit(i));
    }
    (c1, c2)
}

/// Double-point crossover with both cut points drawn uniformly from `[1, 287]`.
pub fn crossover_double_point<R: Rng>(a: &Genotype, b: &Genotype, rng: &mut R) -> (Genotype, Genotype) {
    let p = rng.gen_range(1..GENOME_BITS);
    let q = rng.gen_range(1..GENOME_BITS);
    crossover_at(a, b, p.min(q), p.max(q))
}

/// With probability `mutation_prob` the individual is mutated, flipping each bit
/// independently with probability `1 / 288`.
pub fn mutate<R: Rng>(g: &Genotype, mutation_prob: f64, rng: &mut R) -> Genotype {
    let mut out = *g;
    if rng.gen::<f64>() < mutation_prob {
        let per_bit = 1.0 / GENOME_BITS as f64;
        for i in 0..GENOME_BITS {
            if rng.gen::<f64>() < per_bit {
                out.flip(i);
            }
        }
    }
    out
}

/// Roulette slot sizes: fitness shifted so the worst individual keeps a tiny slot.
pub fn roulette_weights(fitnesses: &[f64]) -> Vec<f64> {
    let min = fitnesses.iter().copied().fold(f64::INFINITY, f64::min);
    fitnesses.iter().map(|f| f - min + ROULETTE_EPSILON).collect()
}

/// Index of an individual drawn with probability proportional to its roulette weight.
pub fn select_roulette<R: Rng>(fitnesses: &[f64], rng: &mut R) -> usize {
    assert!(!fitnesses.is_empty(), "roulette over an empty population");
    let weights = roulette_weights(fitnesses);
    let total: f64 = weights.iter().sum();
    let mut target = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if target < *w {
            return i;
        }
        target -= w;
    }
    weights.len() - 1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    pub elitism_fraction: f64,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 100,
            generations: 100,
            crossover_prob: 0.7,
            mutation_prob: 0.2,
            elitism_fraction: 0.05,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::config("population_size must be at least 2"));
        }
        for (name, p) in [
            ("crossover_prob", self.crossover_prob),
            ("mutation_prob", self.mutation_prob),
            ("elitism_fraction", self.elitism_fraction),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::config(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        Ok(())
    }

    pub fn elite_count(&self) -> usize {
        ((self.elitism_fraction * self.population_size as f64).ceil() as usize).min(self.population_size)
    }

    /// Seed of the visit stream every individual of this run is evaluated on.
    pub fn evaluation_seed(&self) -> u64 {
        derive_seed(self.seed, Stream::Evaluation, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub best_weights: [f64; GENES],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaOutcome {
    pub best_genotype: Genotype,
    pub best_weights: WeightVector,
    pub best_fitness: f64,
    pub evaluation_seed: u64,
    pub evaluations: usize,
    pub history: Vec<GenerationStats>,
}

fn best_index(fitnesses: &[f64]) -> usize {
    let mut best = 0;
    for (i, f) in fitnesses.iter().enumerate() {
        if *f > fitnesses[best] {
            best = i;
        }
    }
    best
}

/// Evolves ASF weights for `world` under `sim_config`.
///
/// Generation 1 is the uniformly random initial population; `generations`
/// populations are evaluated in total (at least one). Every individual is scored
/// on the same world and visit stream, so elites carried over keep their score
/// and the per-generation best never decreases.
pub fn optimize(world: &WorldState, sim_config: &SimulationConfig, ga: &GaConfig) -> Result<GaOutcome> {
    ga.validate()?;
    sim_config.validate_base()?;
    let eval_seed = ga.evaluation_seed();
    let mut rng: SimRng = stream_rng(ga.seed, Stream::Ga, 0);
    let pop_size = ga.population_size;
    let elites = ga.elite_count();

    let mut population: Vec<Genotype> = (0..pop_size).map(|_| Genotype::random(&mut rng)).collect();
    let mut scores: Vec<Option<f64>> = vec![None; pop_size];
    let mut history = Vec::new();
    let mut evaluations = 0;
    let mut best: Option<(Genotype, f64)> = None;

    let total_generations = ga.generations.max(1);
    for generation in 1..=total_generations {
        let pending: Vec<usize> = (0..pop_size).filter(|&i| scores[i].is_none()).collect();
        let evaluated = pending
            .par_iter()
            .map(|&i| fitness(&population[i], world, sim_config, eval_seed))
            .collect::<Result<Vec<f64>>>()?;
        evaluations += evaluated.len();
        for (&i, f) in pending.iter().zip(evaluated) {
            scores[i] = Some(f);
        }
        let fitnesses: Vec<f64> = scores.iter().map(|s| s.expect("scored")).collect();

        let top = best_index(&fitnesses);
        if best.map_or(true, |(_, f)| fitnesses[top] > f) {
            best = Some((population[top], fitnesses[top]));
        }
        history.push(GenerationStats {
            generation,
            best_fitness: fitnesses[top],
            mean_fitness: fitnesses.iter().sum::<f64>() / pop_size as f64,
            best_weights: repair(&decode(&population[top])).as_array(),
        });

        if generation == total_generations {
            break;
        }

        let mut order: Vec<usize> = (0..pop_size).collect();
        order.sort_by(|&a, &b| fitnesses[b].total_cmp(&fitnesses[a]).then(a.cmp(&b)));
        let mut next: Vec<Genotype> = Vec::with_capacity(pop_size);
        let mut next_scores: Vec<Option<f64>> = Vec::with_capacity(pop_size);
        for &i in order.iter().take(elites) {
            next.push(population[i]);
            next_scores.push(Some(fitnesses[i]));
        }
        while next.len() < pop_size {
            let a = population[select_roulette(&fitnesses, &mut rng)];
            let b = population[select_roulette(&fitnesses, &mut rng)];
            let (c1, c2) = if rng.gen::<f64>() < ga.crossover_prob {
                crossover_double_point(&a, &b, &mut rng)
            } else {
                (a, b)
            };
            for child in [c1, c2] {
                if next.len() < pop_size {
                    next.push(mutate(&child, ga.mutation_prob, &mut rng));
                    next_scores.push(None);
                }
            }
        }
        population = next;
        scores = next_scores;
    }

    let (best_genotype, best_fitness) = best.expect("at least one generation evaluated");
    Ok(GaOutcome {
        best_genotype,
        best_weights: repair(&decode(&best_genotype)),
        best_fitness,
        evaluation_seed: eval_seed,
        evaluations,
        history,
    })
}
