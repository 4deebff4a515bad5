#include "scc/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace scc::nn {

std::string GradientCheckReport::summary() const {
    std::ostringstream out;
    out << (passed ? "passed" : "FAILED") << ": " << coordinates_checked << " coordinates, max relative error "
        << max_relative_error;
    if (!worst.parameter.empty()) {
        out << " at " << worst.parameter << "[" << worst.index << "] (analytic " << worst.analytic << ", numeric "
            << worst.numeric << ")";
    }
    return out.str();
}

GradientCheckReport gradient_check(const LossBuilder& loss, std::span<const ParameterPtr> params,
                                   const GradientCheckOptions& options) {
    for (const auto& p : params) p->zero_grad();
    {
        Graph g;
        g.backward(loss(g));
    }
    std::vector<Tensor> analytic;
    analytic.reserve(params.size());
    for (const auto& p : params) {
        analytic.push_back(p->grad);
        p->zero_grad();
    }

    auto evaluate = [&loss] {
        Graph g(false);
        return g.scalar_value(loss(g));
    };

    GradientCheckReport report;
    std::mt19937_64 rng(options.seed);
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        auto& p = *params[pi];
        std::vector<std::size_t> coords(p.value.size());
        std::iota(coords.begin(), coords.end(), std::size_t{0});
        if (coords.size() > options.coordinates_per_parameter) {
            std::shuffle(coords.begin(), coords.end(), rng);
            coords.resize(options.coordinates_per_parameter);
        }
        for (std::size_t i : coords) {
            const double saved = p.value[i];
            p.value[i] = saved + options.epsilon;
            const double up = evaluate();
            p.value[i] = saved - options.epsilon;
            const double down = evaluate();
            p.value[i] = saved;

            GradientCheckEntry e;
            e.parameter = p.name;
            e.index = i;
            e.analytic = analytic[pi][i];
            e.numeric = (up - down) / (2 * options.epsilon);
            const double denom = std::max({std::abs(e.analytic), std::abs(e.numeric), options.denominator_floor});
            e.relative_error = std::abs(e.analytic - e.numeric) / denom;
            ++report.coordinates_checked;
            if (e.relative_error >= report.max_relative_error) {
                report.max_relative_error = e.relative_error;
                report.worst = e;
            }
            if (!(e.relative_error < options.tolerance)) report.failures.push_back(e);
        }
    }
    report.passed = report.failures.empty();
    return report;
}

}  // namespace scc::nn
