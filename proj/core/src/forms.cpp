#include "rlab/forms.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <numeric>

#include "rlab/error.hpp"

namespace rlab {

namespace {

void require_length(std::span<const double> f, std::size_t n) {
  if (f.size() != n)
    throw InvalidArgument("vertex function has length " + std::to_string(f.size()) +
                          ", expected " + std::to_string(n));
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void project_constants(std::span<double> v) {
  double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

}  // namespace

VertexFunction apply_laplacian(const WeightedGraph& g, std::span<const double> f) {
  require_length(f, g.vertex_count());
  VertexFunction out(f.size());
  for (Vertex x = 0; x < g.vertex_count(); ++x) {
    double s = 0.0;
    for (const auto& nb : g.neighbors(x)) s += nb.weight * f[nb.to];
    out[x] = s / g.measure(x) - f[x];
  }
  return out;
}

VertexFunction apply_killed(const WeightedGraph& g, const Region& a, std::span<const double> f) {
  require_length(f, g.vertex_count());
  auto idx = a.local_index(g.vertex_count());
  for (Vertex x = 0; x < g.vertex_count(); ++x)
    if (idx[x] < 0 && f[x] != 0.0)
      throw InvalidArgument("function is not supported on the killing region (vertex " +
                            std::to_string(x) + ")");
  VertexFunction out(f.size(), 0.0);
  for (Vertex x : a.members()) {
    double s = 0.0;
    for (const auto& nb : g.neighbors(x))
      if (idx[nb.to] >= 0) s += nb.weight * f[nb.to];
    out[x] = s / g.measure(x);
  }
  return out;
}

FormOperator::FormOperator(const WeightedGraph& g, int order) : graph_(&g), order_(order) {
  if (order < 1) throw InvalidArgument("form order m must be >= 1");
  local_measure_.assign(g.measures().begin(), g.measures().end());
}

FormOperator::FormOperator(const WeightedGraph& g, int order, Region killing)
    : graph_(&g), order_(order), killing_(std::move(killing)) {
  if (order < 1) throw InvalidArgument("form order m must be >= 1");
  if (killing_->empty()) throw InvalidArgument("killing region must be nonempty");
  local_ = killing_->local_index(g.vertex_count());
  for (Vertex x : killing_->members()) local_measure_.push_back(g.measure(x));
}

void FormOperator::step(std::span<const double> in, std::span<double> out) const {
  const auto& g = *graph_;
  if (!killing_) {
    for (Vertex x = 0; x < g.vertex_count(); ++x) {
      double s = 0.0;
      for (const auto& nb : g.neighbors(x)) s += nb.weight * in[nb.to];
      out[x] = in[x] - s / g.measure(x);
    }
    return;
  }
  auto members = killing_->members();
  for (std::size_t i = 0; i < members.size(); ++i) {
    Vertex x = members[i];
    double s = 0.0;
    for (const auto& nb : g.neighbors(x)) {
      std::int64_t j = local_[nb.to];
      if (j >= 0) s += nb.weight * in[static_cast<std::size_t>(j)];
    }
    out[i] = in[i] - s / g.measure(x);
  }
}

void FormOperator::apply(std::span<const double> f, std::span<double> out) const {
  require_length(f, dimension());
  require_length(out, dimension());
  std::vector<double> a(f.begin(), f.end()), b(f.size());
  for (int k = 0; k < order_; ++k) {
    step(a, b);
    a.swap(b);
  }
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = local_measure_[i] * a[i];
}

VertexFunction FormOperator::apply(std::span<const double> f) const {
  VertexFunction out(dimension());
  apply(f, out);
  return out;
}

double FormOperator::energy(std::span<const double> f, std::span<const double> h) const {
  require_length(h, dimension());
  return dot(apply(f), h);
}

double energy(const WeightedGraph& g, int m, std::span<const double> f, std::span<const double> h) {
  return FormOperator(g, m).energy(f, h);
}

double edge_energy(const WeightedGraph& g, std::span<const double> f, std::span<const double> h) {
  require_length(f, g.vertex_count());
  require_length(h, g.vertex_count());
  double s = 0.0;
  for (const auto& e : g.edges()) s += (f[e.u] - f[e.v]) * (h[e.u] - h[e.v]) * e.weight;
  return s;
}

VertexFunction apply_form(const WeightedGraph& g, int m, std::span<const double> f) {
  return FormOperator(g, m).apply(f);
}

VertexFunction apply_form(const WeightedGraph& g, int m, const Region& a, std::span<const double> f) {
  require_length(f, g.vertex_count());
  FormOperator op(g, m, a);
  VertexFunction local(a.size());
  auto idx = a.local_index(g.vertex_count());
  for (Vertex x = 0; x < g.vertex_count(); ++x) {
    if (idx[x] >= 0)
      local[static_cast<std::size_t>(idx[x])] = f[x];
    else if (f[x] != 0.0)
      throw InvalidArgument("function is not supported on the killing region");
  }
  auto image = op.apply(local);
  VertexFunction out(g.vertex_count(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) out[a[i]] = image[i];
  return out;
}

SolveResult solve_psd(const FormOperator& op, std::span<const double> rhs, SolveOptions options) {
  const std::size_t n = op.dimension();
  require_length(rhs, n);
  if (!(options.tol > 0.0)) throw InvalidArgument("solver tolerance must be positive");
  const std::size_t cap = options.max_iterations ? options.max_iterations : 20 * n;
  const bool singular = !op.killed();

  std::vector<double> b(rhs.begin(), rhs.end());
  double bnorm = norm(b);
  if (singular && bnorm > 0.0) {
    double mean = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(n);
    double off_range = std::fabs(mean) * std::sqrt(static_cast<double>(n)) / bnorm;
    if (off_range > 1e-8)
      throw InvalidArgument("right-hand side is not orthogonal to constants (projection residual " +
                            std::to_string(off_range) + ")");
    project_constants(b);
  }
  SolveResult result;
  result.solution.assign(n, 0.0);
  if (bnorm == 0.0) return result;

  auto diag = op.local_measure();
  std::vector<double> r = b, z(n), p(n), ap(n);
  auto precondition = [&] {
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    if (singular) project_constants(z);
  };
  precondition();
  p = z;
  double rz = dot(r, z);
  auto& x = result.solution;
  for (std::size_t it = 1; it <= cap; ++it) {
    op.apply(p, ap);
    double pap = dot(p, ap);
    if (!(pap > 0.0)) break;
    double alpha = rz / pap;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    if (singular) project_constants(r);
    result.iterations = it;
    if (norm(r) <= options.tol * bnorm) {
      // confirm with the true residual
      auto ax = op.apply(x);
      double true_res = 0.0;
      for (std::size_t i = 0; i < n; ++i) true_res += (ax[i] - b[i]) * (ax[i] - b[i]);
      true_res = std::sqrt(true_res);
      if (true_res <= options.tol * bnorm) {
        if (singular) project_constants(x);
        result.residual = true_res / bnorm;
        return result;
      }
      // recurrence drifted: restart from the true residual
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ax[i];
      if (singular) project_constants(r);
      precondition();
      p = z;
      rz = dot(r, z);
      continue;
    }
    precondition();
    double rz_next = dot(r, z);
    double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  auto ax = op.apply(x);
  double res = 0.0;
  for (std::size_t i = 0; i < n; ++i) res += (ax[i] - b[i]) * (ax[i] - b[i]);
  throw SolverError("conjugate gradient did not converge", std::sqrt(res) / bnorm,
                    result.iterations);
}

struct LaplacianSolver::Impl {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor;
};

LaplacianSolver::LaplacianSolver(const WeightedGraph& g)
    : graph_(&g), killed_(false), impl_(std::make_unique<Impl>()) {
  const std::size_t n = g.vertex_count();
  measure_.assign(g.measures().begin(), g.measures().end());
  if (n == 1) return;
  // ground vertex 0: drop its row and column
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(n + 2 * g.edge_count());
  for (Vertex x = 1; x < n; ++x) t.emplace_back(x - 1, x - 1, g.measure(x));
  for (const auto& e : g.edges()) {
    if (e.u == 0 || e.v == 0) continue;
    t.emplace_back(e.u - 1, e.v - 1, -e.weight);
    t.emplace_back(e.v - 1, e.u - 1, -e.weight);
  }
  Eigen::SparseMatrix<double> l(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(n - 1));
  l.setFromTriplets(t.begin(), t.end());
  impl_->factor.compute(l);
  if (impl_->factor.info() != Eigen::Success)
    throw SolverError("grounded Laplacian factorization failed", 0.0, 0);
}

LaplacianSolver::LaplacianSolver(const WeightedGraph& g, const Region& a)
    : graph_(&g), killed_(true), impl_(std::make_unique<Impl>()) {
  if (a.empty()) throw InvalidArgument("killing region must be nonempty");
  if (a.size() == g.vertex_count())
    throw InvalidArgument("killing region must be a proper subset of the graph");
  auto idx = a.local_index(g.vertex_count());
  std::vector<Eigen::Triplet<double>> t;
  for (std::size_t i = 0; i < a.size(); ++i) {
    Vertex x = a[i];
    measure_.push_back(g.measure(x));
    t.emplace_back(i, i, g.measure(x));
    for (const auto& nb : g.neighbors(x))
      if (idx[nb.to] >= 0) t.emplace_back(i, idx[nb.to], -nb.weight);
  }
  auto n = static_cast<Eigen::Index>(a.size());
  Eigen::SparseMatrix<double> l(n, n);
  l.setFromTriplets(t.begin(), t.end());
  impl_->factor.compute(l);
  if (impl_->factor.info() != Eigen::Success)
    throw SolverError("killed Laplacian factorization failed", 0.0, 0);
}

LaplacianSolver::~LaplacianSolver() = default;
LaplacianSolver::LaplacianSolver(LaplacianSolver&&) noexcept = default;
LaplacianSolver& LaplacianSolver::operator=(LaplacianSolver&&) noexcept = default;

VertexFunction LaplacianSolver::solve(std::span<const double> b) const {
  const std::size_t n = dimension();
  require_length(b, n);
  if (killed_) {
    Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(n));
    Eigen::VectorXd x = impl_->factor.solve(rhs);
    return VertexFunction(x.data(), x.data() + n);
  }
  double sum = 0.0, scale = 0.0;
  for (double v : b) {
    sum += v;
    scale += std::fabs(v);
  }
  if (std::fabs(sum) > 1e-9 * std::max(scale, 1e-300))
    throw InvalidArgument("Laplacian right-hand side must sum to zero");
  VertexFunction x(n, 0.0);
  if (n == 1) return x;
  Eigen::Map<const Eigen::VectorXd> rhs(b.data() + 1, static_cast<Eigen::Index>(n - 1));
  Eigen::VectorXd y = impl_->factor.solve(rhs);
  for (std::size_t i = 1; i < n; ++i) x[i] = y[static_cast<Eigen::Index>(i - 1)];
  return x;
}

VertexFunction LaplacianSolver::form_inverse(int m, std::span<const double> b) const {
  if (m < 1) throw InvalidArgument("form order m must be >= 1");
  const std::size_t n = dimension();
  VertexFunction u = solve(b);
  for (int j = 1; j < m; ++j) {
    if (!killed_) {
      // shift into the range of M^{-1} L: mu-mean zero
      double num = 0.0;
      for (std::size_t i = 0; i < n; ++i) num += measure_[i] * u[i];
      double shift = num / graph_->total_measure();
      for (double& v : u) v -= shift;
    }
    VertexFunction mu(n);
    for (std::size_t i = 0; i < n; ++i) mu[i] = measure_[i] * u[i];
    if (!killed_) {
      // exact zero sum after rounding
      double s = std::accumulate(mu.begin(), mu.end(), 0.0) / static_cast<double>(n);
      for (double& v : mu) v -= s;
    }
    u = solve(mu);
  }
  if (!killed_) project_constants(u);
  return u;
}

}  // namespace rlab
