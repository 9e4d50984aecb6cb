#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ptb {

using Index = std::size_t;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest decimal text that round-trips the double. Atom labels are built with it,
// and CSV fields must match these labels character for character.
std::string format_real(double x);

// A finite list of points in some coordinate space. Coordinates carry names so that
// samples and documents can refer to them.
struct AtomList {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> points;

  std::size_t size() const { return points.size(); }
  std::size_t dim() const { return columns.size(); }
  std::string label(Index atom, Index coord) const { return format_real(points[atom][coord]); }
  std::string describe(Index atom) const;
  // Index of the atom whose labels equal `labels` exactly.
  std::optional<Index> find(const std::vector<std::string>& labels) const;
  std::optional<Index> find_point(const std::vector<double>& point) const;
};

struct SupportSpec {
  AtomList y;
  AtomList z;
  AtomList ystar;
  AtomList u;
  std::vector<int> grid_resolution;  // informational, one entry per latent coordinate

  std::size_t cell_count() const { return y.size() * z.size(); }
  Index cell(Index yi, Index zi) const { return yi * z.size() + zi; }
};

struct ThetaGrid {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> candidates;

  std::size_t size() const { return candidates.size(); }
  // Sup-norm over stacked coordinates.
  double distance(Index a, Index b) const;
  std::string describe(Index t) const;
};

struct PolicyGrid {
  std::vector<std::string> ids;
  // Map tables used by the builders' counterfactual maps (empty for opaque policies).
  std::vector<std::vector<Index>> maps;

  std::size_t size() const { return ids.size(); }
  std::optional<Index> find(const std::string& id) const;
};

struct MomentSpec {
  std::string name;
  double abs_bound = 1.0;
};

struct Objective {
  double phi_lb = 0.0;
  double phi_ub = 1.0;
};

struct ErrorBoundConstants {
  double c1 = 1.0;
  double c2 = 0.0;
  double delta = 1.0;
};

// Evaluators of the set-valued maps, the objective and the moment functions. Every
// argument is an index into the model's atom lists or grids. Implementations must be
// pure so that one instance can serve many readers.
class Primitives {
 public:
  virtual ~Primitives() = default;
  // Latent points consistent with observing (y, z) under theta. May be empty.
  virtual void factual_set(Index y, Index z, Index theta, std::vector<Index>& out) const = 0;
  // Counterfactual outcomes reachable under policy gamma. May be empty.
  virtual void counterfactual_set(Index y, Index z, Index u, Index theta, Index gamma,
                                  std::vector<Index>& out) const = 0;
  virtual double objective(Index ystar, Index y, Index z, Index u) const = 0;
  // Writes all J moment values at once.
  virtual void moments(Index y, Index z, Index u, Index theta, std::span<double> out) const = 0;
};

double mu_star(const ErrorBoundConstants& constants, const Objective& objective);

struct ModelParts {
  SupportSpec support;
  ThetaGrid theta;
  PolicyGrid policies;
  std::vector<MomentSpec> moments;
  Objective objective;
  ErrorBoundConstants constants;
  std::shared_ptr<const Primitives> primitives;
  std::optional<double> mu_star;  // defaults to the floor implied by the constants
  std::string kind = "custom";
};

// Immutable bundle of the decision problem primitives.
class StructuralModel {
 public:
  explicit StructuralModel(ModelParts parts);

  const SupportSpec& support() const { return parts_.support; }
  const ThetaGrid& theta() const { return parts_.theta; }
  const PolicyGrid& policies() const { return parts_.policies; }
  const std::vector<MomentSpec>& moments() const { return parts_.moments; }
  const Objective& objective() const { return parts_.objective; }
  const ErrorBoundConstants& constants() const { return parts_.constants; }
  const Primitives& primitives() const { return *parts_.primitives; }
  const std::string& kind() const { return parts_.kind; }

  std::size_t moment_count() const { return parts_.moments.size(); }
  double mu_star() const { return mu_star_; }
  double mu_floor() const { return mu_floor_; }
  // max(|phi_lb|, |phi_ub|) + mu* * sum of moment bounds.
  double h_bar() const;

  // Copy with a different penalty. Values below the floor are rejected.
  StructuralModel with_mu_star(double mu) const;
  // Copy with any positive penalty, for diagnostics that deliberately violate the floor.
  StructuralModel with_mu_star_unchecked(double mu) const;

 private:
  ModelParts parts_;
  double mu_floor_ = 0.0;
  double mu_star_ = 0.0;
};

enum class Side { lower, upper };

// Pointwise integrand of the envelope problems at one support cell (y, z). Empty
// factual sets give +inf (lower) or -inf (upper).
double h_integrand(const StructuralModel& model, Index y, Index z, Index theta, Index gamma,
                   std::span<const std::uint8_t> lambda, Side side);

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> notes;
  bool ok() const { return violations.empty(); }
};

struct ValidationOptions {
  // Grid scans beyond this many evaluations are skipped and noted.
  std::size_t scan_budget = 20'000'000;
  double tolerance = 1e-12;
};

ValidationReport validate_model(const StructuralModel& model, const ValidationOptions& options = {});

}  // namespace ptb
