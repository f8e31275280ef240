#include "atomflow/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace atomflow::sampler {

using flowmatch::FrameSet;
using geom3::Vec3;
using proteinio::Complex;
using seqflow::Logits;
using seqflow::Sequence;

void SamplerConfig::validate() const {
  require(steps >= 2, Errc::config, "sampler: steps must be >= 2");
  require(activation_threshold > 0.0 && activation_threshold <= 1.0,
          Errc::config, "sampler: activation threshold outside (0, 1]");
  require(trans_std > 0.0, Errc::config, "sampler: trans_std must be > 0");
  require(t_seq_start >= 0.0 && t_seq_start < 1.0, Errc::config,
          "sampler: t_seq_start outside [0, 1)");
  require(t_struct_start >= 0.0 && t_struct_start < 1.0, Errc::config,
          "sampler: t_struct_start outside [0, 1)");
  decode.validate();
}

std::string TrajectoryLog::to_text() const {
  std::ostringstream os;
  os << "# atomflow trajectory v1\n"
        "# step\tsegment\tindex\tt_s\tt_t\tmasked\tmean_trans_speed\t"
        "mean_rot_tangent_norm\n"
        "# place\tchain\tresidue\tdx\tdy\tdz\tdistance\n";
  char buf[256];
  std::size_t next_step = 0;
  int max_segment = 0;
  for (const auto& s : steps) max_segment = std::max(max_segment, s.segment);
  for (int seg = 0; seg <= max_segment; ++seg) {
    for (const auto& p : placements) {
      if (p.chain_index != seg) continue;
      std::snprintf(buf, sizeof buf, "place\t%d\t%d\t%.9g\t%.9g\t%.9g\t%.9g\n",
                    p.chain_index, p.residue_global, p.direction.x(),
                    p.direction.y(), p.direction.z(), p.distance);
      os << buf;
    }
    for (; next_step < steps.size() && steps[next_step].segment == seg;
         ++next_step) {
      const auto& s = steps[next_step];
      std::snprintf(buf, sizeof buf,
                    "step\t%d\t%d\t%.6f\t%.6f\t%d\t%.9g\t%.9g\n", s.segment,
                    s.step, s.t_s, s.t_t, s.masked, s.mean_trans_speed,
                    s.mean_rot_norm);
      os << buf;
    }
  }
  return os.str();
}

namespace {

constexpr double kOracleLogitMargin = 20.0;

struct FlatComplex {
  Sequence seq;
  FrameSet frames;
  allatom::TorsionTable torsions;
  std::vector<int> chain_lengths;
  std::vector<std::string> chain_ids;

  int size() const { return static_cast<int>(seq.size()); }
};

FlatComplex flatten(const Complex& c) {
  FlatComplex out;
  for (const auto& ch : c.chains) {
    out.seq.insert(out.seq.end(), ch.seq.begin(), ch.seq.end());
    out.frames.insert(out.frames.end(), ch.frames.begin(), ch.frames.end());
    out.torsions.insert(out.torsions.end(), ch.torsions.begin(),
                        ch.torsions.end());
    out.chain_lengths.push_back(ch.length());
    out.chain_ids.push_back(ch.id);
  }
  return out;
}

Complex assemble(const FlatComplex& flat) {
  Complex out;
  int offset = 0;
  for (std::size_t k = 0; k < flat.chain_lengths.size(); ++k) {
    const int len = flat.chain_lengths[k];
    const auto b = static_cast<std::size_t>(offset);
    const auto e = static_cast<std::size_t>(offset + len);
    out.chains.push_back(proteinio::build_chain(
        flat.chain_ids[k], Sequence(flat.seq.begin() + b, flat.seq.begin() + e),
        FrameSet(flat.frames.begin() + b, flat.frames.begin() + e),
        allatom::TorsionTable(flat.torsions.begin() + b,
                              flat.torsions.begin() + e)));
    offset += len;
  }
  return out;
}

void check_target_complete(const FlatComplex& flat) {
  require(flat.size() >= 1, Errc::invalid_argument, "oracle: empty target");
  for (int i = 0; i < flat.size(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    require(flat.seq[idx] != seqflow::kMaskToken, Errc::invalid_argument,
            "oracle: target sequence is masked at position " +
                std::to_string(i));
    const auto& tpl = allatom::residue_template(flat.seq[idx]);
    for (int k = 0; k < tpl.chi_count(); ++k)
      require(flat.torsions[idx].defined[static_cast<std::size_t>(k)],
              Errc::invalid_argument,
              "oracle: target torsions incomplete at position " +
                  std::to_string(i));
  }
}

Logits peaked_logits(const Sequence& seq) {
  Logits out = Logits::Zero(static_cast<Eigen::Index>(seq.size()),
                            seqflow::kVocabSize);
  for (std::size_t i = 0; i < seq.size(); ++i)
    out(static_cast<Eigen::Index>(i), seq[i]) = kOracleLogitMargin;
  return out;
}

class GroundTruthOracle final : public Denoiser {
 public:
  explicit GroundTruthOracle(FlatComplex target) : target_(std::move(target)) {
    check_target_complete(target_);
  }

  DenoiserOutput predict(const DenoiserInput& in) const override {
    const auto n = in.seq.size();
    require(n >= 1 && n <= target_.seq.size(), Errc::contract,
            "oracle: query longer than target");
    require(in.frames.size() == n, Errc::contract,
            "oracle: input shape mismatch");
    DenoiserOutput out;
    out.logits = peaked_logits(
        Sequence(target_.seq.begin(),
                 target_.seq.begin() + static_cast<std::ptrdiff_t>(n)));
    out.frames.assign(target_.frames.begin(),
                      target_.frames.begin() + static_cast<std::ptrdiff_t>(n));
    out.torsions = allatom::TorsionTable(
        target_.torsions.begin(),
        target_.torsions.begin() + static_cast<std::ptrdiff_t>(n));
    return out;
  }

 private:
  FlatComplex target_;
};

class PerturbedOracle final : public Denoiser {
 public:
  PerturbedOracle(FlatComplex target, double noise_scale,
                  std::uint64_t rng_seed)
      : target_(std::move(target)) {
    check_target_complete(target_);
    require(noise_scale >= 0.0, Errc::invalid_argument,
            "perturbed oracle: negative noise scale");
    perturbed_ = target_.frames;
    Rng rng(rng_seed);
    for (auto& f : perturbed_) {
      f.translation += noise_scale * Vec3(rng.gaussian(), rng.gaussian(),
                                          rng.gaussian());
      const Vec3 axis(rng.gaussian(), rng.gaussian(), rng.gaussian());
      if (axis.norm() > 1e-12) {
        const double angle = 0.1 * noise_scale * rng.gaussian();
        f.rotation =
            f.rotation * geom3::so3_exp(axis.normalized() * angle);
      }
    }
  }

  DenoiserOutput predict(const DenoiserInput& in) const override {
    const auto n = in.seq.size();
    require(n >= 1 && n <= target_.seq.size(), Errc::contract,
            "oracle: query longer than target");
    require(in.frames.size() == n, Errc::contract,
            "oracle: input shape mismatch");
    const auto& frames = in.role == Role::SeqBB ? perturbed_ : target_.frames;
    DenoiserOutput out;
    out.logits = peaked_logits(
        Sequence(target_.seq.begin(),
                 target_.seq.begin() + static_cast<std::ptrdiff_t>(n)));
    out.frames.assign(frames.begin(),
                      frames.begin() + static_cast<std::ptrdiff_t>(n));
    out.torsions = allatom::TorsionTable(
        target_.torsions.begin(),
        target_.torsions.begin() + static_cast<std::ptrdiff_t>(n));
    return out;
  }

 private:
  FlatComplex target_;
  FrameSet perturbed_;
};

void check_denoiser_output(const DenoiserOutput& out, std::size_t n,
                           bool need_torsions) {
  require(out.frames.size() == n, Errc::contract,
          "denoiser output frame count violates the contract");
  require(out.logits.rows() == static_cast<Eigen::Index>(n) &&
              out.logits.cols() == seqflow::kVocabSize,
          Errc::contract, "denoiser output logit shape violates the contract");
  require(out.logits.allFinite(), Errc::contract,
          "denoiser output logits are not finite");
  if (need_torsions)
    require(out.torsions && out.torsions->size() == n, Errc::contract,
            "denoiser sidechain output lacks torsions");
}

Sequence argmax_tokens(const Logits& logits) {
  Sequence out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    int best = 0;
    for (int j = 1; j < seqflow::kNumAminoAcids; ++j)
      if (logits(i, j) > logits(i, best)) best = j;
    out[static_cast<std::size_t>(i)] = static_cast<seqflow::Token>(best);
  }
  return out;
}

std::string chain_letter(int index) {
  static const char* alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  return std::string(1, alphabet[index % 26]);
}

// One trajectory; `fixed` residues (when present) are conditioning context:
// they stay at the clean state and only the new residues are updated.
SampleResult run_impl(const Denoiser& denoiser,
                      const std::vector<int>& new_lengths,
                      const SamplerConfig& cfg, Rng& rng,
                      const FlatComplex* fixed, int segment) {
  cfg.validate();
  int n_new = 0;
  for (int len : new_lengths) {
    require(len >= 1, Errc::invalid_argument, "chain length must be >= 1");
    n_new += len;
  }
  require(n_new >= 1, Errc::invalid_argument, "no residues requested");
  const int n_fixed = fixed ? fixed->size() : 0;
  const auto nf = static_cast<std::size_t>(n_fixed);
  const std::size_t n_total = static_cast<std::size_t>(n_fixed + n_new);

  Sequence state_seq(n_total, seqflow::kMaskToken);
  FrameSet state_frames(n_total);
  std::vector<std::uint8_t> cond;
  if (fixed) {
    std::copy(fixed->seq.begin(), fixed->seq.end(), state_seq.begin());
    std::copy(fixed->frames.begin(), fixed->frames.end(),
              state_frames.begin());
    cond.assign(n_total, 0);
    std::fill(cond.begin(), cond.begin() + n_fixed, 1);
  }
  const FrameSet prior = flowmatch::sample_prior(n_new, rng, cfg.trans_std);
  std::copy(prior.begin(), prior.end(), state_frames.begin() + n_fixed);

  const double dt_s = (1.0 - cfg.t_seq_start) / cfg.steps;
  const double dt_t = (1.0 - cfg.t_struct_start) / cfg.steps;

  TrajectoryLog log;
  DenoiserOutput pred;
  for (int i = 0; i < cfg.steps; ++i) {
    const double t_s = cfg.t_seq_start + i * dt_s;
    const double t_t = cfg.t_struct_start + i * dt_t;
    const double t_s_next = i + 1 == cfg.steps ? 1.0 : cfg.t_seq_start +
                                                           (i + 1) * dt_s;

    DenoiserInput in{state_seq, state_frames, t_s, t_t, Role::SeqBB,
                     std::nullopt, cond};
    DenoiserOutput seqbb = denoiser.predict(in);
    check_denoiser_output(seqbb, n_total, false);

    Logits logits = seqbb.logits;
    FrameSet frame_pred = seqbb.frames;
    std::optional<allatom::TorsionTable> torsions;
    if (t_s >= cfg.activation_threshold) {
      const Sequence pred_seq = argmax_tokens(logits);
      DenoiserInput side_in{pred_seq, frame_pred, t_s, t_t, Role::Sidechain,
                            std::nullopt, cond};
      DenoiserOutput side = denoiser.predict(side_in);
      check_denoiser_output(side, n_total, true);
      torsions = side.torsions;

      DenoiserInput refine_in{pred_seq, frame_pred, t_s, t_t, Role::Refine,
                              torsions, cond};
      DenoiserOutput refine = denoiser.predict(refine_in);
      check_denoiser_output(refine, n_total, false);
      logits = seqflow::blend_logits(seqbb.logits, refine.logits, t_s,
                                     cfg.decode);
      frame_pred = refine.frames;
    }
    pred = DenoiserOutput{logits, frame_pred, torsions};

    // Sequence update on the generated part only.
    const Logits new_logits =
        logits.bottomRows(static_cast<Eigen::Index>(n_new));
    const Sequence sampled =
        seqflow::sample_tokens(new_logits, t_s, cfg.decode, rng);
    const auto scores =
        seqflow::score_positions(new_logits, sampled, t_s, rng);
    const Sequence next_new = seqflow::remask_topk(sampled, scores, t_s_next);
    std::copy(next_new.begin(), next_new.end(), state_seq.begin() + n_fixed);

    // Frame update on the generated part only.
    FrameSet cur_new(state_frames.begin() + n_fixed, state_frames.end());
    FrameSet tgt_new(frame_pred.begin() + n_fixed, frame_pred.end());
    double speed = 0.0, rot_norm = 0.0;
    for (int r = 0; r < n_new; ++r) {
      speed += flowmatch::vf_trans(cur_new[static_cast<std::size_t>(r)]
                                       .translation,
                                   tgt_new[static_cast<std::size_t>(r)]
                                       .translation,
                                   t_t)
                   .norm();
      rot_norm += flowmatch::vf_rot(
                      cur_new[static_cast<std::size_t>(r)].rotation,
                      tgt_new[static_cast<std::size_t>(r)].rotation, t_t,
                      cfg.rot_schedule)
                      .norm();
    }
    const FrameSet stepped =
        flowmatch::euler_step(cur_new, tgt_new, t_t, dt_t, cfg.rot_schedule);
    std::copy(stepped.begin(), stepped.end(), state_frames.begin() + n_fixed);

    int masked = 0;
    for (const auto t : next_new)
      if (t == seqflow::kMaskToken) ++masked;
    log.steps.push_back({segment, i, t_s, t_t, masked, speed / n_new,
                         rot_norm / n_new});
  }

  // Final state from the last prediction.
  FlatComplex out;
  out.seq.resize(n_total);
  out.frames.resize(n_total);
  if (fixed) {
    std::copy(fixed->seq.begin(), fixed->seq.end(), out.seq.begin());
    std::copy(fixed->frames.begin(), fixed->frames.end(), out.frames.begin());
    out.chain_lengths = fixed->chain_lengths;
    out.chain_ids = fixed->chain_ids;
  }
  const Sequence final_new = argmax_tokens(
      pred.logits.bottomRows(static_cast<Eigen::Index>(n_new)));
  std::copy(final_new.begin(), final_new.end(), out.seq.begin() + n_fixed);
  std::copy(pred.frames.begin() + n_fixed, pred.frames.end(),
            out.frames.begin() + n_fixed);
  for (std::size_t k = 0; k < new_lengths.size(); ++k) {
    out.chain_lengths.push_back(new_lengths[k]);
    out.chain_ids.push_back(
        chain_letter(static_cast<int>(out.chain_ids.size())));
  }

  // Terminal sidechain query supplies the torsions.
  DenoiserInput side_in{out.seq, out.frames, 1.0, 1.0, Role::Sidechain,
                        std::nullopt, cond};
  DenoiserOutput side = denoiser.predict(side_in);
  check_denoiser_output(side, n_total, true);
  out.torsions = *side.torsions;
  if (fixed)
    std::copy(fixed->torsions.begin(), fixed->torsions.end(),
              out.torsions.begin());

  return {assemble(out), std::move(log)};
}

}  // namespace

SampleResult run_sampling(const Denoiser& denoiser,
                          const std::vector<int>& chain_lengths,
                          const SamplerConfig& cfg, Rng& rng) {
  require(!chain_lengths.empty(), Errc::invalid_argument,
          "run_sampling: no chains requested");
  return run_impl(denoiser, chain_lengths, cfg, rng, nullptr, 0);
}

SampleResult chain_by_chain(const Denoiser& denoiser,
                            const std::vector<int>& chain_lengths,
                            const SamplerConfig& cfg, Rng& rng) {
  require(chain_lengths.size() >= 2, Errc::invalid_argument,
          "chain_by_chain: need at least 2 chains");
  SampleResult result =
      run_impl(denoiser, {chain_lengths[0]}, cfg, rng, nullptr, 0);
  FlatComplex fixed = flatten(result.complex);

  for (std::size_t k = 1; k < chain_lengths.size(); ++k) {
    // Binding-site selection over the generated part: ranks in the
    // [ceil(0.33 n), floor(0.66 n)] window of CA distance to the centroid.
    const int n = fixed.size();
    Vec3 centroid = Vec3::Zero();
    for (const auto& f : fixed.frames) centroid += f.translation;
    centroid /= static_cast<double>(n);
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      const double da =
          (fixed.frames[static_cast<std::size_t>(a)].translation - centroid)
              .norm();
      const double db =
          (fixed.frames[static_cast<std::size_t>(b)].translation - centroid)
              .norm();
      if (da != db) return da < db;
      return a < b;
    });
    int lo = static_cast<int>(std::ceil(0.33 * n));
    int hi = static_cast<int>(std::floor(0.66 * n));
    lo = std::clamp(lo, 1, n);
    hi = std::clamp(hi, lo, n);
    const int rank = rng.uniform_int(lo, hi);  // 1-based
    const int chosen = order[static_cast<std::size_t>(rank - 1)];

    const Vec3 ca = fixed.frames[static_cast<std::size_t>(chosen)].translation;
    const Vec3 dir = ca.norm() > 1e-9 ? Vec3(-ca.normalized()) : Vec3(1, 0, 0);
    const Vec3 shift = -ca + dir;  // chosen CA lands 1 Å past the origin
    for (auto& f : fixed.frames) f.translation += shift;

    result.log.placements.push_back(
        {static_cast<int>(k), chosen, dir, 1.0});

    SampleResult next = run_impl(denoiser, {chain_lengths[k]}, cfg, rng,
                                 &fixed, static_cast<int>(k));
    for (const auto& s : next.log.steps) result.log.steps.push_back(s);
    result.complex = std::move(next.complex);
    fixed = flatten(result.complex);
  }
  return result;
}

std::unique_ptr<Denoiser> make_ground_truth_oracle(const Complex& target) {
  return std::make_unique<GroundTruthOracle>(flatten(target));
}

std::unique_ptr<Denoiser> make_perturbed_oracle(const Complex& target,
                                                double noise_scale,
                                                std::uint64_t rng_seed) {
  return std::make_unique<PerturbedOracle>(flatten(target), noise_scale,
                                           rng_seed);
}

}  // namespace atomflow::sampler
