#include "hofd/indices.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "hofd/errors.hpp"

namespace hofd {

namespace {

double empirical_cov(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double n = static_cast<double>(a.size());
    return (a.array() - a.mean()).matrix().dot((b.array() - b.mean()).matrix()) / n;
}

Eigen::VectorXd column_quantile(const Eigen::MatrixXd& M, double q) {
    Eigen::VectorXd out(M.cols());
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
        std::vector<double> v(M.col(j).data(), M.col(j).data() + M.rows());
        std::sort(v.begin(), v.end());
        const double h = q * static_cast<double>(v.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const auto hi = std::min(lo + 1, v.size() - 1);
        const double w = h - static_cast<double>(lo);
        out[j] = (1.0 - w) * v[lo] + w * v[hi];
    }
    return out;
}

}  // namespace

ComponentSet reconstruct_components(const DesignMatrix& design,
                                    const CoefficientVector& coef) {
    if (coef.beta.size() != design.m()) {
        throw DataError("coefficient vector has " + std::to_string(coef.beta.size()) +
                        " entries for a design of " + std::to_string(design.m()) +
                        " columns");
    }
    const std::size_t blocks = design.subsets.size();
    ComponentSet comp;
    comp.subsets = design.subsets;
    comp.y = design.y;
    comp.values.resize(design.n(), static_cast<Eigen::Index>(blocks) + 1);
    Eigen::VectorXd total = Eigen::VectorXd::Zero(design.n());
    for (std::size_t k = 0; k < blocks; ++k) {
        const auto block = design.Phi.middleCols(design.offsets[k], design.sizes[k]);
        const auto beta_block = coef.beta.segment(design.offsets[k], design.sizes[k]);
        comp.values.col(static_cast<Eigen::Index>(k)) = block * beta_block;
        total += comp.values.col(static_cast<Eigen::Index>(k));
        comp.labels.push_back(design.subsets[k].label());
    }
    // Residual pseudo-component: whatever the fitted expansion leaves behind,
    // so the columns add back to the centered response exactly.
    comp.values.col(static_cast<Eigen::Index>(blocks)) = design.y - total;
    comp.labels.push_back("rest");
    return comp;
}

SensitivityReport estimate_indices(const ComponentSet& components) {
    const Eigen::Index n = components.n();
    const int k = components.count();
    const double total_var = (components.y.array() - components.y.mean()).square().sum() /
                             static_cast<double>(n);
    if (!(total_var > 0.0)) {
        throw DataError("constant response: nothing to decompose");
    }

    SensitivityReport report;
    report.total_variance = total_var;
    report.n = n;
    report.cov_labels = components.labels;
    report.component_cov.resize(k, k);
    for (int a = 0; a < k; ++a) {
        for (int b = a; b < k; ++b) {
            const double c = empirical_cov(components.values.col(a), components.values.col(b));
            report.component_cov(a, b) = c;
            report.component_cov(b, a) = c;
        }
    }

    double sum = 0.0;
    for (int a = 0; a < k; ++a) {
        IndexEntry e;
        e.label = components.labels[static_cast<std::size_t>(a)];
        // Covariance with the response spreads the full variance across the
        // components, which is what makes the indices sum to one.
        e.index = empirical_cov(components.values.col(a), components.y) / total_var;
        e.var_part = report.component_cov(a, a) / total_var;
        e.cov_part = e.index - e.var_part;
        sum += e.index;
        report.entries.push_back(std::move(e));
    }
    report.sum = sum;
    if (std::abs(sum - 1.0) > 1e-10) {
        throw NumericalError("sensitivity indices sum to " + std::to_string(sum) +
                             " instead of 1; the decomposition is inconsistent");
    }
    return report;
}

ReplicateSummary replicate(const std::function<SensitivityReport(std::uint64_t)>& pipeline,
                           const std::vector<std::uint64_t>& seeds, int jobs) {
    if (seeds.size() < 2) {
        throw ConfigError("replication needs at least 2 seeds");
    }
    ReplicateSummary summary;
    summary.requested = static_cast<int>(seeds.size());

    struct Slot {
        bool ok = false;
        SensitivityReport report;
        std::string error;
    };
    std::vector<Slot> slots(seeds.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= seeds.size()) break;
            try {
                slots[i].report = pipeline(seeds[i]);
                slots[i].ok = true;
            } catch (const std::exception& e) {
                slots[i].error = e.what();
            }
        }
    };
    const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(seeds.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::vector<std::size_t> ok_indices;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i].ok) {
            ok_indices.push_back(i);
        } else {
            ++summary.failed;
            summary.failure_messages.push_back("seed " + std::to_string(seeds[i]) + ": " +
                                               slots[i].error);
        }
    }
    if (ok_indices.empty()) {
        throw NumericalError("every replicate failed; first error: " +
                             (summary.failure_messages.empty()
                                  ? std::string("unknown")
                                  : summary.failure_messages.front()));
    }

    const auto& first = slots[ok_indices.front()].report;
    for (const auto& e : first.entries) summary.labels.push_back(e.label);
    summary.draws.resize(static_cast<Eigen::Index>(ok_indices.size()),
                         static_cast<Eigen::Index>(summary.labels.size()));
    for (std::size_t r = 0; r < ok_indices.size(); ++r) {
        const auto& rep = slots[ok_indices[r]].report;
        if (rep.entries.size() != summary.labels.size()) {
            throw DataError("replicates disagree on the index layout");
        }
        for (std::size_t e = 0; e < rep.entries.size(); ++e) {
            summary.draws(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(e)) =
                rep.entries[e].index;
        }
        summary.seeds.push_back(seeds[ok_indices[r]]);
    }

    const double R = static_cast<double>(summary.draws.rows());
    summary.mean = summary.draws.colwise().mean();
    summary.sd.resize(summary.draws.cols());
    for (Eigen::Index j = 0; j < summary.draws.cols(); ++j) {
        const double mu = summary.mean[j];
        // sample standard deviation over replicates
        summary.sd[j] = R > 1.0
                            ? std::sqrt((summary.draws.col(j).array() - mu).square().sum() /
                                        (R - 1.0))
                            : 0.0;
    }
    summary.q25 = column_quantile(summary.draws, 0.25);
    summary.median = column_quantile(summary.draws, 0.5);
    summary.q75 = column_quantile(summary.draws, 0.75);
    return summary;
}

}  // namespace hofd
