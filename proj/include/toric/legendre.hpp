#ifndef TORIC_LEGENDRE_HPP
#define TORIC_LEGENDRE_HPP

#include <functional>
#include <vector>

#include "toric/polytope.hpp"

namespace toric {

// Convex piecewise-linear potential phi(x) = max_i (<p_i, x> - c_i).
// The slopes are the dual nodes; e^{-phi} is integrable iff 0 lies in the
// interior of their convex hull.
struct MaxAffinePotential {
    int dim = 0;
    std::vector<RatVec> slopes;
    std::vector<double> intercepts;
    std::vector<std::vector<double>> slopes_d; // cached double copies

    MaxAffinePotential() = default;
    MaxAffinePotential(std::vector<RatVec> slopes, std::vector<double> intercepts);

    double value(const std::vector<double>& x) const;
    int argmax(const std::vector<double>& x) const; // lowest index wins ties
    MaxAffinePotential translated(const std::vector<double>& a) const; // phi(x + a)
};

// phi = psi_P, the support function of P: slopes are the vertices, all
// intercepts zero. Its Legendre dual is 0 on P and +infinity outside.
MaxAffinePotential support_potential(const Polytope& p);

// Values of a dual potential u on quadrature nodes of P. Weights are exact
// rationals summing to Vol(P); nodes always include the vertices of P.
struct DualGridFunction {
    int dim = 0;
    std::vector<RatVec> nodes;
    std::vector<double> values;
    std::vector<Rat> weights;
    Rat total_weight; // == Vol(P)
};

// Regular lattice grid (1/s)Z^n intersected with P, augmented by the
// vertices. The requested s is rounded up to a multiple of the vertex
// denominator lcm when that lcm is small, so the vertices are lattice nodes
// and carry genuine quadrature weight. n = 1 uses exact trapezoid weights;
// n >= 2 uses exact cell volumes, with the slivers of P belonging to cells
// of outside lattice points reassigned to the nearest interior node.
DualGridFunction make_dual_grid(const Polytope& p, int s);

// Effective lattice refinement after vertex-denominator snapping.
int snapped_grid_parameter(const Polytope& p, int s);

// Support function evaluations, exact over Q.
struct SupportFunction {
    explicit SupportFunction(const Polytope& p) : vertices_(p.vertices()) {}
    Rat operator()(const RatVec& x) const;
    double operator()(const std::vector<double>& x) const;

private:
    std::vector<RatVec> vertices_;
};

// Discrete Legendre transform of grid data: max_i (<p_i, x> - u_i),
// ties broken by the lowest node index.
double legendre_transform(const DualGridFunction& u, const std::vector<double>& x,
                          int* arg_index = nullptr);

// Quadrature of int_P u dy with the grid weights.
double integrate_dual(const DualGridFunction& u);

struct IntegralResult {
    double value = 0;
    double error_bound = 0;
};

// int_{R^n} e^{-phi} dx. n = 1 is an exact piecewise closed form; n = 2,3
// integrate the first coordinate exactly along rows and apply a doubling
// composite rule with an analytic support-cone tail bound in the remaining
// coordinates. Throws TailDivergence if 0 is not interior to the slope hull.
IntegralResult integrate_exp_neg(const MaxAffinePotential& phi, double tol);

struct SantaloResult {
    double product = 0;       // int e^{-phi*} . int e^{-phi} after recentering
    double bound = 0;         // (2 pi)^n
    bool holds = false;       // product <= bound + tol
    double primal_integral = 0;
    double dual_integral = 0;
    std::vector<double> center; // the recentering translation
};

// Functional Santalo test: recenters e^{-phi} dx to zero barycenter, then
// compares int e^{-phi*} . int e^{-phi} with (2 pi)^n.
SantaloResult santalo_check(const MaxAffinePotential& phi, double tol);

namespace detail {

// Line y = slope * x - drop. Upper envelopes keep original indices.
struct Line {
    double slope;
    double drop;
    int index;
};

struct EnvelopePiece {
    double slope;
    double drop;
    int index;
    double x_left; // -inf encoded as -HUGE_VAL
};

// Upper envelope of lines, pieces ordered left to right.
std::vector<EnvelopePiece> upper_envelope(std::vector<Line> lines);
// Same, for lines already sorted by (slope, drop): one stack pass, no sort.
std::vector<EnvelopePiece> upper_envelope_sorted(const std::vector<Line>& lines);

// Scaled integrals: value = mantissa * exp(scale).
struct Scaled {
    double mantissa = 0;
    double scale = 0;
    double to_double() const;
};

struct RowIntegral {
    Scaled total;
    Scaled moment; // int x e^{-phi}, same scale as total
};

// Exact integral of e^{-envelope} over R. When masses != nullptr each piece
// adds mass_weight * piece_integral / exp(mass_scale_hint) to
// masses[line.index].
RowIntegral exp_integral_envelope(const std::vector<EnvelopePiece>& env,
                                  std::vector<double>* masses, double mass_scale_hint,
                                  double mass_weight, bool want_moment);

Scaled scaled_sum(const std::vector<Scaled>& terms, const std::vector<double>& weights);

// Tail data for e^{-phi}: phi >= r ||x||_inf - C.
struct TailCertificate {
    double r = 0;
    double c = 0;
};
TailCertificate tail_certificate(const MaxAffinePotential& phi);
TailCertificate tail_certificate_for_grid(const Polytope& p,
                                          const MaxAffinePotential& phi,
                                          const std::vector<int>& vertex_node_indices);
// Analytic bound on int_{||y||_inf > R} of the (n-1)-dimensional outer
// profile of e^{C - r ||x||_inf} after exact integration over x_1.
double outer_tail_bound(int n, double r, double c, double radius);

} // namespace detail

} // namespace toric

#endif
