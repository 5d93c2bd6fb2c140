#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "orthant/complex.hpp"

namespace orthant {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1].
const double GL7_X[] = {-0.9491079123427585, -0.7415311855993945,
                        -0.4058451513773972, 0.0,
                        0.4058451513773972,  0.7415311855993945,
                        0.9491079123427585};
const double GL7_W[] = {0.1294849661688697, 0.2797053914892766,
                        0.3818300505051189, 0.4179591836734694,
                        0.3818300505051189, 0.2797053914892766,
                        0.1294849661688697};

const double GL15_X[] = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272,
    -0.7244177313601701, -0.5709721726085388, -0.3941513470775634,
    -0.2011940939974345, 0.0,                 0.2011940939974345,
    0.3941513470775634,  0.5709721726085388,  0.7244177313601701,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
const double GL15_W[] = {
    0.0307532419961173, 0.0703660474881081, 0.1071592204671719,
    0.1395706779261543, 0.1662692058169939, 0.1861610000155622,
    0.1984314853271116, 0.2025782419255613, 0.1984314853271116,
    0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
    0.1071592204671719, 0.0703660474881081, 0.0307532419961173};

struct Cell {
  const Face* face;
  std::vector<double> lo, hi;
  double est = 0.0;
  double err = 0.0;
};

struct CellOrder {
  bool operator()(const Cell& a, const Cell& b) const { return a.err < b.err; }
};

class CellEvaluator {
public:
  CellEvaluator(const SpacePtr& space,
                const std::function<double(const Point&)>& f)
      : space_(space), f_(f) {}

  long evals = 0;

  void evaluate(Cell& c) {
    double coarse = rule(c, GL7_X, GL7_W, 7);
    double fine = rule(c, GL15_X, GL15_W, 15);
    c.est = fine;
    c.err = std::abs(fine - coarse);
  }

private:
  double rule(const Cell& c, const double* xs, const double* ws, int n) {
    coords_.assign(c.face->size(), 0.0);
    return rule_rec(c, xs, ws, n, 0);
  }

  double rule_rec(const Cell& c, const double* xs, const double* ws, int n,
                  std::size_t dim) {
    const double mid = 0.5 * (c.lo[dim] + c.hi[dim]);
    const double half = 0.5 * (c.hi[dim] - c.lo[dim]);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      coords_[dim] = mid + half * xs[i];
      double v;
      if (dim + 1 == c.face->size()) {
        std::vector<std::pair<int, double>> pc;
        pc.reserve(c.face->size());
        for (std::size_t d = 0; d < c.face->size(); ++d)
          pc.emplace_back((*c.face)[d], coords_[d]);
        ++evals;
        v = f_(Point::make_indexed(space_, pc));
      } else {
        v = rule_rec(c, xs, ws, n, dim + 1);
      }
      sum += ws[i] * v;
    }
    return sum * half;
  }

  const SpacePtr& space_;
  const std::function<double(const Point&)>& f_;
  std::vector<double> coords_;
};

}  // namespace

double integrate(const SpacePtr& c, const std::function<double(const Point&)>& f,
                 const BorelBoxSet& domain, double tol) {
  if (tol <= 0.0) throw Error("bad-parameter", "quadrature tol must be > 0");

  CellEvaluator eval(c, f);
  std::priority_queue<Cell, std::vector<Cell>, CellOrder> queue;
  double total = 0.0;
  double total_err = 0.0;
  long max_evals = 0;

  for (const auto& box : domain.boxes) {
    for (std::size_t d = 0; d < box.face.size(); ++d) {
      if (box.lower[d] > box.upper[d] || box.lower[d] < 0.0)
        throw Error("bad-parameter",
                    "box bounds must satisfy 0 <= lower <= upper");
    }
    bool empty = box.face.empty();
    for (std::size_t d = 0; d < box.face.size(); ++d)
      if (box.lower[d] == box.upper[d]) empty = true;
    if (empty) continue;

    max_evals += 1L << 20;
    Cell root{&box.face, box.lower, box.upper};
    eval.evaluate(root);
    total += root.est;
    total_err += root.err;
    queue.push(std::move(root));
  }

  auto budget = [&] { return tol * std::max(std::abs(total), 1e-300); };

  while (!queue.empty() && total_err > 0.5 * budget() &&
         eval.evals < max_evals) {
    Cell worst = queue.top();
    queue.pop();
    total -= worst.est;
    total_err -= worst.err;

    std::size_t widest = 0;
    for (std::size_t d = 1; d < worst.lo.size(); ++d)
      if (worst.hi[d] - worst.lo[d] > worst.hi[widest] - worst.lo[widest])
        widest = d;
    double mid = 0.5 * (worst.lo[widest] + worst.hi[widest]);

    Cell left{worst.face, worst.lo, worst.hi};
    left.hi[widest] = mid;
    Cell right{worst.face, worst.lo, worst.hi};
    right.lo[widest] = mid;
    eval.evaluate(left);
    eval.evaluate(right);
    total += left.est + right.est;
    total_err += left.err + right.err;
    queue.push(std::move(left));
    queue.push(std::move(right));
  }

  if (total_err > budget())
    throw Error("quadrature-nonconvergent",
                "quadrature did not converge; achieved error estimate " +
                    std::to_string(total_err));
  return total;
}

}  // namespace orthant
