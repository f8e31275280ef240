#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "atomflow/geom3.hpp"
#include "atomflow/proteinio.hpp"
#include "atomflow/seqflow.hpp"

namespace atomflow::metrics {

using geom3::Vec3;

struct KabschResult {
  double rmsd = 0.0;                  // Å
  geom3::RigidTransform transform{};  // maps a onto b
};

// Minimal RMSD over rigid superpositions (centroid alignment + SVD with
// reflection correction). Needs >= 3 points and a non-degenerate
// configuration.
KabschResult kabsch_rmsd(std::span<const Vec3> a, std::span<const Vec3> b);

// Amino-acid recovery: fraction of identical positions. Inputs must be
// equal-length and mask-free.
double aar(const seqflow::Sequence& pred, const seqflow::Sequence& truth);

// Fixed-width angular histograms over [0, 2pi), one per (type, chi index).
struct ChiHistogram {
  int bins = 72;
  std::array<std::array<std::vector<std::int64_t>, 4>, 20> counts{};
  std::int64_t total = 0;

  // Delimited export: type <tab> chi index <tab> bin left edge <tab> count.
  std::string to_text() const;
};

ChiHistogram chi_histograms(std::span<const proteinio::Complex> dataset,
                            int bins = 72);

// Accumulates one complex into an existing histogram (shards are additive).
void accumulate_chi_histogram(ChiHistogram& hist, const proteinio::Complex& c);

}  // namespace atomflow::metrics
