#pragma once

#include <memory>
#include <string>
#include <vector>

#include "atomflow/denoiser.hpp"
#include "atomflow/proteinio.hpp"
#include "atomflow/rng.hpp"

namespace atomflow::sampler {

struct SamplerConfig {
  int steps = 100;
  // Sidechain and Refine are queried once t_s reaches this; 1.0 disables
  // them for the whole trajectory.
  double activation_threshold = 0.8;
  flowmatch::Schedule rot_schedule = flowmatch::Schedule::exponential(10.0);
  seqflow::DecodeConfig decode;
  double trans_std = 10.0;  // prior translation std, Å
  std::uint64_t seed = 0;
  // Both modalities advance on the same uniform grid by default; a non-zero
  // start decouples one modality's time from the other.
  double t_seq_start = 0.0;
  double t_struct_start = 0.0;

  void validate() const;
};

struct StepRecord {
  int segment = 0;  // chain index being generated (chain-by-chain mode)
  int step = 0;
  double t_s = 0.0;
  double t_t = 0.0;
  int masked = 0;  // MASK tokens entering the next step
  double mean_trans_speed = 0.0;
  double mean_rot_norm = 0.0;
};

struct PlacementRecord {
  int chain_index = 0;
  int residue_global = 0;  // chosen binding-site residue, global index
  geom3::Vec3 direction = geom3::Vec3::Zero();
  double distance = 0.0;  // final distance of the chosen CA from the origin
};

struct TrajectoryLog {
  std::vector<StepRecord> steps;
  std::vector<PlacementRecord> placements;
  std::string to_text() const;  // line-delimited records
};

struct SampleResult {
  proteinio::Complex complex;
  TrajectoryLog log;
};

// Full staged trajectory: masked sequence + prior frames, per-step denoiser
// queries (SeqBB always; Sidechain and Refine past the activation
// threshold), confidence-based remasking, Euler frame updates; the output is
// assembled from the final prediction.
SampleResult run_sampling(const Denoiser& denoiser,
                          const std::vector<int>& chain_lengths,
                          const SamplerConfig& cfg, Rng& rng);

// Sequential complex generation: each new chain is generated with all
// previously generated chains held fixed at the clean state, after placing
// a sampled binding-site residue 1 Å past the origin.
SampleResult chain_by_chain(const Denoiser& denoiser,
                            const std::vector<int>& chain_lengths,
                            const SamplerConfig& cfg, Rng& rng);

// Verification denoiser returning the target (prefix-sliced to the queried
// length) regardless of the noised input. Throws on incomplete targets.
std::unique_ptr<Denoiser> make_ground_truth_oracle(
    const proteinio::Complex& target);

// Like the ground-truth oracle, but the SeqBB role answers with a frozen
// perturbation of the target (translations jittered by noise_scale Å,
// rotations by ~0.1 * noise_scale rad) while Refine answers clean.
std::unique_ptr<Denoiser> make_perturbed_oracle(
    const proteinio::Complex& target, double noise_scale,
    std::uint64_t rng_seed);

}  // namespace atomflow::sampler
