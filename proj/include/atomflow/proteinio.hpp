#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "atomflow/allatom.hpp"
#include "atomflow/flowmatch.hpp"
#include "atomflow/rng.hpp"
#include "atomflow/seqflow.hpp"

namespace atomflow::proteinio {

using allatom::AtomRecord;
using allatom::TorsionTable;
using flowmatch::FrameSet;
using geom3::Vec3;
using seqflow::Sequence;

// One chain: parallel per-residue arrays, all of equal length.
struct Chain {
  std::string id;
  Sequence seq;
  FrameSet frames;
  TorsionTable torsions;
  std::vector<std::vector<AtomRecord>> atoms;  // per residue, may be empty
  std::vector<int> resseq;                     // PDB residue numbers
  std::vector<double> plddt;                   // per residue; empty if absent

  int length() const { return static_cast<int>(seq.size()); }
};

// Multi-chain complex plus curation metadata.
struct Complex {
  std::vector<Chain> chains;
  std::string source_id;
  std::optional<std::string> cluster_id;
  // Full-length chain sequences of the pre-crop parent, set by
  // crop_interface so downstream consumers keep the original context.
  std::vector<std::string> parent_sequences;

  int total_residues() const;
  bool has_plddt() const;
  double mean_plddt() const;  // over all residues carrying a value
};

struct ParseWarning {
  int line = 0;
  std::string message;
};

struct ParseResult {
  Complex complex;
  std::vector<ParseWarning> warnings;
};

// Reads fixed-column ATOM/TER/MODEL records (first model only; altloc blank
// or 'A'). Residues missing any of N/CA/C are dropped with a warning; chains
// containing non-standard residue names are dropped with a warning. Throws
// Errc::parse (with line number) on malformed records and
// Errc::empty_complex when nothing survives.
ParseResult parse_pdb(std::string_view text, std::string source_id = "");

// Standard fixed-width ATOM records, 3-decimal coordinates, TER between
// chains, END terminator. pLDDT (when present) is written to the B-factor
// column.
std::string write_pdb(const Complex& c);

enum class SourceTag { PdbMultichain, Swissprot, Afdb, PdbSinglechain };
SourceTag source_tag_from_string(std::string_view s);  // throws on unknown
std::string_view to_string(SourceTag tag);

struct CurationPolicy {
  int min_chain_len = 30;
  int max_total_len = 2048;
  double swissprot_plddt = 85.0;  // keep strictly above
  double afdb_plddt = 95.0;       // keep strictly above
  bool require_cluster_id = true;
};

struct CurationInput {
  const Complex* complex;
  SourceTag tag;
};

struct CurationVerdict {
  std::string id;
  bool kept;
  std::string reason;  // rule label when dropped, empty when kept
};

// Applies the drop rules per item; pure and order-independent.
std::vector<CurationVerdict> curate(const std::vector<CurationInput>& items,
                                    const CurationPolicy& policy);

struct ResidueRef {
  int chain = 0;
  int residue = 0;
  friend auto operator<=>(const ResidueRef&, const ResidueRef&) = default;
};

struct InterfacePair {
  ResidueRef a, b;  // lexicographically normalized, a < b
  friend auto operator<=>(const InterfacePair&, const InterfacePair&) = default;
};

// All cross-chain residue pairs whose contact atoms (CB, CA fallback) lie
// within cutoff, sorted lexicographically. Throws no_interface for
// single-chain input.
std::vector<InterfacePair> find_interface_pairs(const Complex& c,
                                                double cutoff);

struct CropSpec {
  int max_residues = 384;
  double interface_cutoff = 8.0;  // Å, CB-CB with CA fallback
};

struct CropResult {
  Complex complex;
  bool cropped = false;
  InterfacePair selected{};  // meaningful when cropped
};

// Interface-centered crop: picks one interface pair uniformly at random and
// keeps the max_residues residues whose CA lies nearest the pair midpoint
// (ties keep the lower global index). Inputs at or under budget return
// unchanged. Throws no_interface when cropping is needed but no pair exists.
CropResult crop_interface(const Complex& c, const CropSpec& spec, Rng& rng);

// Assembles a residue's chain entry from sequence/frame/chi via the residue
// templates (convenience used by the sampler and fixtures).
Chain build_chain(const std::string& id, const Sequence& seq,
                  const FrameSet& frames, const TorsionTable& torsions);

}  // namespace atomflow::proteinio
