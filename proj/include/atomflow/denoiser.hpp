#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "atomflow/allatom.hpp"
#include "atomflow/flowmatch.hpp"
#include "atomflow/seqflow.hpp"

namespace atomflow::sampler {

// The three denoiser roles: joint sequence/backbone prediction, sidechain
// torsion completion, and all-atom-aware refinement.
enum class Role { SeqBB, Sidechain, Refine };

struct DenoiserOutput {
  seqflow::Logits logits;      // N x 21
  flowmatch::FrameSet frames;  // length N
  std::optional<allatom::TorsionTable> torsions;
};

struct DenoiserInput {
  seqflow::Sequence seq;
  flowmatch::FrameSet frames;
  double t_s = 0.0;
  double t_t = 0.0;
  Role role = Role::SeqBB;
  // Predicted chis, supplied on Refine calls.
  std::optional<allatom::TorsionTable> torsions;
  // Per-residue flag; 1 marks residues held at the clean state as
  // conditioning context. Empty means unconditional.
  std::vector<std::uint8_t> condition_mask;
};

// Prediction contract. Implementations must be deterministic given identical
// inputs; all stochasticity lives in the sampler's rng. Output shapes must
// match input shapes.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual DenoiserOutput predict(const DenoiserInput& in) const = 0;
  // Implementations that are not safe for concurrent invocation return
  // false; callers running multiple trajectories honor this.
  virtual bool thread_safe() const { return true; }
};

}  // namespace atomflow::sampler
