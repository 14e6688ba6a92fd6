#pragma once

#include "nsplab/penalties.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace nsplab {

enum class Condition { nsp, insp, nsp_fs, gnsp };
enum class Status { holds_strict, holds_nonstrict, fails };
enum class Method { exact_trivial, exact_dim1, exact_dim2_sweep, sampled };

std::string_view to_string(Condition c);
std::string_view to_string(Status s);
std::string_view to_string(Method m);

struct SearchConfig {
  double r_min = 1e-3;
  double r_max = 1e3;
  std::size_t radii = 61;
  std::size_t starts = 64;
  std::size_t restarts = 3;
  std::size_t directions = 256;  // sampled directions for non-homogeneous penalties
  std::size_t max_ambient = 24;  // guard for exhaustive support enumeration
  double tol_zero = 1e-9;
  std::uint64_t seed = 0;
};

struct CertificateWitness {
  Vec v;                        // kernel vector realizing the margin
  SupportSet support;           // the offending (or worst) S
  std::optional<ExactVec> v_exact;
};

/// Outcome of a null-space-property check. `margin` is the worst-case
/// lhs - rhs over kernel vectors normalized to ||v||_inf = 1 (for
/// non-homogeneous penalties: over the radial search range, unnormalized).
struct CertificateReport {
  Condition condition = Condition::nsp;
  std::size_t s = 0;
  std::optional<SupportSet> fixed_support;
  std::string penalty;  // gNSP only
  double margin = 0.0;
  std::optional<Rational> exact_margin;
  Status status = Status::fails;
  Method method = Method::sampled;
  std::optional<CertificateWitness> witness;

  /// NSP, NSP-fs and gNSP need the strict inequality; iNSP accepts equality.
  bool holds() const;
  nlohmann::json to_json() const;
};

struct L1Certificates {
  CertificateReport nsp;
  CertificateReport insp;
};

/// sup over normalized kernel vectors of (sum of the s largest |v_i|) minus
/// (sum of the rest); reported once as NSP and once as iNSP.
L1Certificates l1_margin(const KernelBasis& k, std::size_t s, const SearchConfig& cfg = {});
L1Certificates l1_margin(const ExactKernelBasis& k, std::size_t s, const SearchConfig& cfg = {});

CertificateReport fixed_support_margin(const KernelBasis& k, const SupportSet& support,
                                       const SearchConfig& cfg = {});
CertificateReport fixed_support_margin(const ExactKernelBasis& k, const SupportSet& support,
                                       const SearchConfig& cfg = {});

/// Searches for v in ker(A)\{0} and #S <= s with R(v_S) >= R(v_{S^c}).
CertificateReport gnsp_certify(const PenaltySpec& r, const KernelBasis& k, std::size_t s,
                               const SearchConfig& cfg = {});
CertificateReport gnsp_certify(const PenaltySpec& r, const ExactKernelBasis& k, std::size_t s,
                               const SearchConfig& cfg = {});

/// Recomputes the margin realized by a report's witness (NSP/iNSP/NSP-fs
/// ignore `r`).
double replay_margin(const CertificateReport& report, const PenaltySpec* r = nullptr);

/// Every S with 1 <= #S <= s, in lexicographic order of sorted index lists.
std::vector<SupportSet> supports_up_to(std::size_t n, std::size_t s);

}  // namespace nsplab
