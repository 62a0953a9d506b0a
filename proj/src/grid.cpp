#include "lagphase/grid.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace lagphase {

namespace {
constexpr double kPi = std::numbers::pi;

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

BoxDomain::BoxDomain(Eigen::VectorXd lower, Eigen::VectorXd upper,
                     int resolution)
    : lower_(std::move(lower)), upper_(std::move(upper)),
      resolution_(resolution) {
  const int d = dim();
  if (d < 1 || d > 4 || upper_.size() != d) {
    throw std::invalid_argument("BoxDomain: dimension must be in [1, 4]");
  }
  if (resolution_ < 5 || resolution_ > 257) {
    throw std::invalid_argument("BoxDomain: resolution must be in [5, 257]");
  }
  spacing_.resize(d);
  for (int k = 0; k < d; ++k) {
    if (!(upper_[k] > lower_[k])) {
      throw std::invalid_argument("BoxDomain: upper must exceed lower");
    }
    spacing_[k] = (upper_[k] - lower_[k]) / (resolution_ - 1);
  }
}

std::int64_t BoxDomain::node_count() const {
  std::int64_t c = 1;
  for (int k = 0; k < dim(); ++k) c *= resolution_;
  return c;
}

std::int64_t BoxDomain::interior_count() const {
  std::int64_t c = 1;
  for (int k = 0; k < dim(); ++k) c *= (resolution_ - 2);
  return c;
}

std::int64_t BoxDomain::linear_index(const std::vector<int>& multi) const {
  std::int64_t idx = 0, stride = 1;
  for (int k = 0; k < dim(); ++k) {
    idx += multi[k] * stride;
    stride *= resolution_;
  }
  return idx;
}

std::vector<int> BoxDomain::multi_index(std::int64_t linear) const {
  std::vector<int> multi(dim());
  for (int k = 0; k < dim(); ++k) {
    multi[k] = static_cast<int>(linear % resolution_);
    linear /= resolution_;
  }
  return multi;
}

bool BoxDomain::is_boundary(const std::vector<int>& multi) const {
  for (int k = 0; k < dim(); ++k) {
    if (multi[k] == 0 || multi[k] == resolution_ - 1) return true;
  }
  return false;
}

Eigen::VectorXd BoxDomain::coordinates(const std::vector<int>& multi) const {
  Eigen::VectorXd x(dim());
  for (int k = 0; k < dim(); ++k) x[k] = lower_[k] + multi[k] * spacing_[k];
  return x;
}

void BoxDomain::for_each_node(
    const std::function<void(std::int64_t, const std::vector<int>&)>& fn)
    const {
  std::vector<int> multi(dim(), 0);
  const std::int64_t total = node_count();
  for (std::int64_t i = 0; i < total; ++i) {
    fn(i, multi);
    for (int k = 0; k < dim(); ++k) {
      if (++multi[k] < resolution_) break;
      multi[k] = 0;
    }
  }
}

bool BoxDomain::operator==(const BoxDomain& other) const {
  return resolution_ == other.resolution_ && lower_ == other.lower_ &&
         upper_ == other.upper_;
}

GridField::GridField(BoxDomain domain, Eigen::VectorXd values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (values_.size() != domain_.node_count()) {
    throw std::invalid_argument("GridField: value count does not match grid");
  }
  boundary_mask_.resize(values_.size());
  domain_.for_each_node([&](std::int64_t i, const std::vector<int>& m) {
    boundary_mask_[i] = domain_.is_boundary(m) ? 1 : 0;
  });
}

GridField::GridField(BoxDomain domain)
    : GridField(domain, Eigen::VectorXd::Zero(domain.node_count())) {}

GridField GridField::Sample(
    const BoxDomain& domain,
    const std::function<double(const Eigen::VectorXd&)>& fn) {
  Eigen::VectorXd values(domain.node_count());
  domain.for_each_node([&](std::int64_t i, const std::vector<int>& m) {
    values[i] = fn(domain.coordinates(m));
  });
  return GridField(domain, std::move(values));
}

void ProblemSpec::Validate() const {
  if (!setting.valid()) {
    throw std::invalid_argument("ProblemSpec: unsupported setting");
  }
  if (domain.dim() != setting.spatial_dim()) {
    throw std::invalid_argument(
        "ProblemSpec: domain dimension does not match setting");
  }
  if (!(delta > 0) || !(delta < kPi)) {
    throw std::invalid_argument("ProblemSpec: delta must lie in (0, pi)");
  }
  const double floor = band().lower();
  const double ceil = setting.n * kPi / 2;
  domain.for_each_node([&](std::int64_t i, const std::vector<int>& m) {
    if (domain.is_boundary(m)) {
      if (usub[i] != phi[i]) {
        std::ostringstream os;
        os << "ProblemSpec: usub/phi boundary mismatch at node (";
        for (size_t k = 0; k < m.size(); ++k) os << (k ? "," : "") << m[k];
        os << ")";
        throw std::invalid_argument(os.str());
      }
      return;
    }
    if (h[i] < floor) {
      std::ostringstream os;
      os << "ProblemSpec: h below supercritical band at node (";
      for (size_t k = 0; k < m.size(); ++k) os << (k ? "," : "") << m[k];
      os << "): " << h[i] << " < " << floor;
      throw std::invalid_argument(os.str());
    }
    if (h[i] >= ceil) {
      std::ostringstream os;
      os << "ProblemSpec: h at or above n*pi/2 at node (";
      for (size_t k = 0; k < m.size(); ++k) os << (k ? "," : "") << m[k];
      os << ")";
      throw std::invalid_argument(os.str());
    }
  });
}

SymMatrix HessianReal(const GridField& field, const std::vector<int>& node) {
  const BoxDomain& dom = field.domain();
  const int d = dom.dim();
  for (int k = 0; k < d; ++k) {
    if (node[k] <= 0 || node[k] >= dom.resolution() - 1) {
      throw std::invalid_argument("HessianReal: node must be interior");
    }
  }
  const Eigen::VectorXd& u = field.values();
  std::vector<int> m = node;
  SymMatrix H(d, d);
  const std::int64_t center = dom.linear_index(node);
  for (int a = 0; a < d; ++a) {
    const double ha = dom.spacing(a);
    m[a] += 1;
    const double up = u[dom.linear_index(m)];
    m[a] -= 2;
    const double dn = u[dom.linear_index(m)];
    m[a] += 1;
    H(a, a) = (up - 2.0 * u[center] + dn) / (ha * ha);
    for (int b = a + 1; b < d; ++b) {
      const double hb = dom.spacing(b);
      m[a] += 1; m[b] += 1;
      const double pp = u[dom.linear_index(m)];
      m[b] -= 2;
      const double pm = u[dom.linear_index(m)];
      m[a] -= 2;
      const double mm = u[dom.linear_index(m)];
      m[b] += 2;
      const double mp = u[dom.linear_index(m)];
      m[a] += 1; m[b] -= 1;
      const double cross = (pp - pm - mp + mm) / (4.0 * ha * hb);
      H(a, b) = cross;
      H(b, a) = cross;
    }
  }
  return H;
}

HermMatrix HessianComplex(const GridField& field, const std::vector<int>& node,
                          const Setting& setting) {
  if (setting.kind != Setting::Kind::kComplex) {
    throw std::invalid_argument("HessianComplex: setting must be complex");
  }
  const int n = setting.n;
  if (field.domain().dim() != 2 * n) {
    throw std::invalid_argument("HessianComplex: domain dimension mismatch");
  }
  const SymMatrix R = HessianReal(field, node);
  HermMatrix H(n, n);
  for (int i = 0; i < n; ++i) {
    const int xi = 2 * i, yi = 2 * i + 1;
    H(i, i) = 0.25 * (R(xi, xi) + R(yi, yi));
    for (int j = i + 1; j < n; ++j) {
      const int xj = 2 * j, yj = 2 * j + 1;
      const std::complex<double> v(0.25 * (R(xi, xj) + R(yi, yj)),
                                   0.25 * (R(xi, yj) - R(yi, xj)));
      H(i, j) = v;
      H(j, i) = std::conj(v);
    }
  }
  return H;
}

GridField EvalOperatorField(const Setting& setting, const GridField& field) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(field.values().size());
  const BoxDomain& dom = field.domain();
  dom.for_each_node([&](std::int64_t i, const std::vector<int>& m) {
    if (dom.is_boundary(m)) return;
    if (setting.kind == Setting::Kind::kReal) {
      out[i] = OperatorValue(HessianReal(field, m));
    } else {
      out[i] = OperatorValue(HessianComplex(field, m, setting));
    }
  });
  return GridField(dom, std::move(out));
}

GridField EvalOperatorField(const ProblemSpec& spec, const GridField& field) {
  if (!(field.domain() == spec.domain)) {
    throw std::invalid_argument("EvalOperatorField: field/domain mismatch");
  }
  return EvalOperatorField(spec.setting, field);
}

void WriteFieldCsv(const GridField& field, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("WriteFieldCsv: cannot open " + path);
  const BoxDomain& dom = field.domain();
  for (int k = 0; k < dom.dim(); ++k) out << "x" << (k + 1) << ",";
  out << "value\n";
  dom.for_each_node([&](std::int64_t i, const std::vector<int>& m) {
    const Eigen::VectorXd x = dom.coordinates(m);
    for (int k = 0; k < dom.dim(); ++k) out << FormatDouble(x[k]) << ",";
    out << FormatDouble(field[i]) << "\n";
  });
}

GridField ReadFieldCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ReadFieldCsv: cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) {
    throw std::runtime_error("ReadFieldCsv: empty file " + path);
  }
  int cols = 1;
  for (char c : header) cols += (c == ',');
  const int d = cols - 1;
  if (d < 1 || d > 4) {
    throw std::runtime_error("ReadFieldCsv: unsupported column count");
  }
  std::vector<Eigen::VectorXd> coords;
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Eigen::VectorXd x(d);
    std::string tok;
    for (int k = 0; k < d; ++k) {
      if (!std::getline(ls, tok, ',')) {
        throw std::runtime_error("ReadFieldCsv: short row");
      }
      x[k] = std::stod(tok);
    }
    if (!std::getline(ls, tok, ',')) {
      throw std::runtime_error("ReadFieldCsv: missing value column");
    }
    coords.push_back(std::move(x));
    values.push_back(std::stod(tok));
  }
  // Reconstruct the box: resolution along axis 0 is the period of the
  // fastest coordinate; node count must be resolution^d.
  const std::int64_t total = static_cast<std::int64_t>(values.size());
  int res = 0;
  for (std::int64_t i = 1; i < total; ++i) {
    if (coords[i][0] < coords[i - 1][0]) { res = static_cast<int>(i); break; }
  }
  if (res == 0) res = static_cast<int>(total);
  std::int64_t expect = 1;
  for (int k = 0; k < d; ++k) expect *= res;
  if (expect != total) {
    throw std::runtime_error("ReadFieldCsv: rows do not form a full lattice");
  }
  Eigen::VectorXd lower = coords.front(), upper = coords.back();
  BoxDomain dom(lower, upper, res);
  Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(values.data(), total);
  return GridField(std::move(dom), std::move(v));
}

}  // namespace lagphase
