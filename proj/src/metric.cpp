#include "shapegeo/metric.hpp"

#include <cmath>

namespace shapegeo {

void PhiSpec::validate() const
{
    if (!(A >= 0.0) || !(B >= 0.0)) throw PreconditionError("Phi weights A and B must be nonnegative");
    if (k < 1) throw PreconditionError("mean-curvature exponent k must be a positive integer");
    const double twice = 2.0 * l;
    if (!(l >= 0.5) || twice != std::round(twice)) {
        throw PreconditionError("Gauss exponent l must be a positive multiple of 1/2");
    }
}

double PhiSpec::operator()(double H, double K) const
{
    double phi = 1.0;
    if (include_mean && A != 0.0) phi += A * std::pow(H, 2 * k);
    if (include_gauss && B != 0.0) phi += B * std::pow(std::abs(K), 2.0 * l);
    return phi;
}

double PhiSpec::d_mean(double H, double /*K*/) const
{
    if (!include_mean || A == 0.0) return 0.0;
    return 2.0 * k * A * std::pow(H, 2 * k - 1);
}

double PhiSpec::d_gauss(double /*H*/, double K) const
{
    if (!include_gauss || B == 0.0 || K == 0.0) return 0.0;
    const double s = K > 0.0 ? 1.0 : -1.0;
    return 2.0 * l * B * s * std::pow(std::abs(K), 2.0 * l - 1.0);
}

ScalarField phi_eval(const PhiSpec& spec, const CurvatureField& field)
{
    ScalarField phi(field.size());
    for (std::size_t v = 0; v < field.size(); ++v) {
        phi[v] = spec(field.mean_curvature[v], field.gauss_curvature[v]);
    }
    return phi;
}

double g_phi_inner(const PhiSpec& spec, const CurvatureField& field, const VectorField& h, const VectorField& k)
{
    if (h.size() != field.size() || k.size() != field.size()) {
        throw PreconditionError("vector fields do not live on the same mesh as the curvature field");
    }
    CompensatedSum<double> sum;
    for (std::size_t v = 0; v < field.size(); ++v) {
        const double phi = spec(field.mean_curvature[v], field.gauss_curvature[v]);
        sum += phi * h[v].dot(k[v]) * field.vertex_area[v];
    }
    return sum.value();
}

double g_phi_inner(const PhiSpec& spec, const TriMesh& mesh, const VectorField& h, const VectorField& k)
{
    if (static_cast<int>(h.size()) != mesh.num_vertices() || static_cast<int>(k.size()) != mesh.num_vertices()) {
        throw PreconditionError("vector fields do not match the mesh vertex count");
    }
    return g_phi_inner(spec, compute_curvature(mesh), h, k);
}

NormalSplit normal_decompose(const TriMesh& mesh, const CurvatureField& field, const VectorField& h)
{
    const auto n = static_cast<std::size_t>(mesh.num_vertices());
    if (h.size() != n || field.size() != n) throw PreconditionError("field size does not match the mesh");
    NormalSplit out{ScalarField(n), VectorField(n)};
    for (std::size_t v = 0; v < n; ++v) {
        const Vec3& nu = field.unit_normal[v];
        out.normal[v] = h[v].dot(nu);
        out.tangential[v] = h[v] - out.normal[v] * nu;
    }
    return out;
}

} // namespace shapegeo
