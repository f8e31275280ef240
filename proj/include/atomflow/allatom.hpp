#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "atomflow/geom3.hpp"
#include "atomflow/seqflow.hpp"

namespace atomflow::allatom {

using geom3::RigidTransform;
using geom3::Vec3;

struct AtomRecord {
  std::string name;
  char element = 'C';
  Vec3 pos = Vec3::Zero();  // Å
  int residue_index = 0;    // index within owning chain
  std::string chain_id;
};

// Per-residue chi angles in [0, 2pi); undefined entries are never read.
struct ChiRow {
  std::array<double, 4> chi{};
  std::array<bool, 4> defined{};
};
using TorsionTable = std::vector<ChiRow>;

// Placement rule for one template atom: bond to ref[2], bond angle at
// ref[2] against ref[1], dihedral over (ref[0], ref[1], ref[2], this).
struct AtomSpec {
  std::string name;
  char element;
  int group;  // 0 = backbone, k >= 1 moves rigidly with chi_k
  std::array<std::string, 3> ref;
  double bond_length;  // Å
  double bond_angle;   // radians
  bool chi_driven;
  int chi_index;   // 1-based, meaningful when chi_driven
  double torsion;  // fixed dihedral, or offset added to chi_k (radians)
};

struct ChiSpec {
  std::array<std::string, 4> atoms;
  bool pi_periodic;
};

struct ResidueTemplate {
  std::string name3;
  char code1;
  std::vector<std::pair<std::string, Vec3>> roots;  // N, CA, C template pose
  std::vector<AtomSpec> atoms;                      // placement order
  std::vector<ChiSpec> chis;

  int chi_count() const { return static_cast<int>(chis.size()); }
  bool has_atom(std::string_view name) const;
};

const ResidueTemplate& residue_template(seqflow::Token aa);
const ResidueTemplate* find_residue_template(std::string_view name3);

double wrap_angle_2pi(double a);

// Signed torsion about the p2-p3 axis (IUPAC sign), wrapped to [0, 2pi).
double dihedral(const Vec3& p1, const Vec3& p2, const Vec3& p3,
                const Vec3& p4);

// Places a point at the given bond length / bond angle / dihedral relative
// to three reference positions (see AtomSpec).
Vec3 nerf_place(const Vec3& a, const Vec3& b, const Vec3& c, double bond,
                double angle, double torsion);

// Residue frame: origin at CA, axes from Gram-Schmidt on (C-CA, N-CA).
RigidTransform frames_from_backbone(const Vec3& n, const Vec3& ca,
                                    const Vec3& c);

// Chi angles from atom coordinates. The strict form throws missing_atom when
// a quadruple atom is absent; the partial form flags those chis undefined
// and counts them.
ChiRow extract_torsions(std::span<const AtomRecord> atoms, seqflow::Token aa);
ChiRow extract_torsions_partial(std::span<const AtomRecord> atoms,
                                seqflow::Token aa,
                                int* missing_chis = nullptr);

struct BuiltResidue {
  std::vector<AtomRecord> atoms;
  // group_frames[0] is the backbone frame; group_frames[k] the frame of the
  // chi_k rigid group, built from that chi's last three quadruple atoms.
  std::vector<RigidTransform> group_frames;
};

// Places all heavy atoms of the residue: the idealized template pose is
// chained through the supplied chi angles, then mapped through `frame`.
// Throws invalid_argument when a required chi is undefined.
BuiltResidue build_sidechain(seqflow::Token aa, const RigidTransform& frame,
                             const ChiRow& chi);

// Pi-periodic chis mapped to [0, pi); all others to [0, 2pi). Idempotent.
ChiRow canonicalize_chi(seqflow::Token aa, const ChiRow& chi);

}  // namespace atomflow::allatom
