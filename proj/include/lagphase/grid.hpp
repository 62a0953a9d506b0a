#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "lagphase/spectral.hpp"

// Box-domain lattices and finite-difference Hessians.  Nodes are ordered
// lexicographically with axis 0 fastest; this ordering is fixed so all
// serialized outputs are byte-stable.

namespace lagphase {

class BoxDomain {
 public:
  BoxDomain(Eigen::VectorXd lower, Eigen::VectorXd upper, int resolution);

  int dim() const { return static_cast<int>(lower_.size()); }
  int resolution() const { return resolution_; }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  double spacing(int axis) const { return spacing_[axis]; }

  std::int64_t node_count() const;
  std::int64_t interior_count() const;

  /// Linear index of a multi-index (axis 0 fastest).
  std::int64_t linear_index(const std::vector<int>& multi) const;
  std::vector<int> multi_index(std::int64_t linear) const;
  bool is_boundary(const std::vector<int>& multi) const;
  Eigen::VectorXd coordinates(const std::vector<int>& multi) const;

  /// Visits multi-indices in linear order.
  void for_each_node(
      const std::function<void(std::int64_t, const std::vector<int>&)>& fn)
      const;

  bool operator==(const BoxDomain& other) const;

 private:
  Eigen::VectorXd lower_, upper_;
  int resolution_;
  Eigen::VectorXd spacing_;
};

/// Scalar values on every node of a BoxDomain, with a boundary mask.
class GridField {
 public:
  GridField(BoxDomain domain, Eigen::VectorXd values);

  /// Zero-initialized field.
  explicit GridField(BoxDomain domain);

  /// Samples fn(x) at every node.
  static GridField Sample(const BoxDomain& domain,
                          const std::function<double(const Eigen::VectorXd&)>& fn);

  const BoxDomain& domain() const { return domain_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }
  double operator[](std::int64_t i) const { return values_[i]; }
  bool is_boundary(std::int64_t i) const { return boundary_mask_[i] != 0; }
  const std::vector<std::uint8_t>& boundary_mask() const {
    return boundary_mask_;
  }

 private:
  BoxDomain domain_;
  Eigen::VectorXd values_;
  std::vector<std::uint8_t> boundary_mask_;
};

/// Real vs complex interpretation of a grid field.  In the complex
/// setting the spatial dimension is 2n with coordinates ordered
/// (x1, y1, ..., xn, yn).
struct Setting {
  enum class Kind { kReal, kComplex };
  Kind kind = Kind::kReal;
  int n = 2;  // operator dimension

  int spatial_dim() const { return kind == Kind::kReal ? n : 2 * n; }
  bool valid() const {
    return kind == Kind::kReal ? (n == 2 || n == 3) : (n == 1 || n == 2);
  }
};

/// Dirichlet problem data: target phase h, boundary values phi,
/// subsolution usub, supercriticality margin delta.
struct ProblemSpec {
  BoxDomain domain;
  Setting setting;
  GridField h;
  GridField phi;   // meaningful on boundary nodes only
  GridField usub;
  double delta = 0.0;

  PhaseBand band() const { return PhaseBand{setting.n, delta}; }

  /// Throws std::invalid_argument naming the violated invariant.
  void Validate() const;
};

/// Second-order central-difference Hessian at an interior node.
SymMatrix HessianReal(const GridField& field, const std::vector<int>& node);

/// Complex Hessian u_{i jbar} under d_i = (d/dx_i - i d/dy_i)/2, built
/// from the real Hessian entries; Hermitian with real diagonal exactly.
HermMatrix HessianComplex(const GridField& field, const std::vector<int>& node,
                          const Setting& setting);

/// F evaluated node-by-node on interior nodes; boundary entries are 0.
GridField EvalOperatorField(const ProblemSpec& spec, const GridField& field);
GridField EvalOperatorField(const Setting& setting, const GridField& field);

/// CSV with header "x1,...,xd,value", one node per row in linear order,
/// 17-significant-digit round-trip formatting.
void WriteFieldCsv(const GridField& field, const std::string& path);
GridField ReadFieldCsv(const std::string& path);

}  // namespace lagphase
