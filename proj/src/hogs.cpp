#include "hofd/hogs.hpp"

#include <cmath>
#include <sstream>

#include "hofd/errors.hpp"
#include "hofd/serialize.hpp"

namespace hofd {

namespace {

// All degree multi-indices for the given per-variable sizes; the last
// coordinate varies fastest.
std::vector<std::vector<int>> odometer(const std::vector<int>& dims) {
    std::vector<std::vector<int>> out;
    std::vector<int> idx(dims.size(), 0);
    while (true) {
        out.push_back(idx);
        int j = static_cast<int>(dims.size()) - 1;
        while (j >= 0) {
            if (++idx[static_cast<std::size_t>(j)] < dims[static_cast<std::size_t>(j)]) break;
            idx[static_cast<std::size_t>(j)] = 0;
            --j;
        }
        if (j < 0) break;
    }
    return out;
}

// Products of per-variable function values, one column per multi-index.
// per_input[i] holds that input's univariate function values (rows = points).
Eigen::MatrixXd tensor_columns(const std::vector<const Eigen::MatrixXd*>& per_input,
                               const SubsetIndex& u,
                               const std::vector<std::vector<int>>& multi) {
    const Eigen::Index rows = per_input[static_cast<std::size_t>(u.vars[0])]->rows();
    Eigen::MatrixXd T(rows, static_cast<Eigen::Index>(multi.size()));
    for (std::size_t t = 0; t < multi.size(); ++t) {
        Eigen::VectorXd col = Eigen::VectorXd::Ones(rows);
        for (std::size_t a = 0; a < u.vars.size(); ++a) {
            col = col.cwiseProduct(
                per_input[static_cast<std::size_t>(u.vars[a])]->col(multi[t][a]));
        }
        T.col(static_cast<Eigen::Index>(t)) = col;
    }
    return T;
}

std::vector<const Eigen::MatrixXd*> value_pointers(const std::vector<UnivariateSystem>& sys) {
    std::vector<const Eigen::MatrixXd*> out;
    out.reserve(sys.size());
    for (const auto& s : sys) out.push_back(&s.values);
    return out;
}

}  // namespace

std::vector<int> HogsConfig::resolved_levels(int p) const {
    if (levels.empty()) throw ConfigError("no basis sizes given");
    std::vector<int> out;
    if (levels.size() == 1) {
        out.assign(static_cast<std::size_t>(p), levels[0]);
    } else if (levels.size() == static_cast<std::size_t>(p)) {
        out = levels;
    } else {
        throw ConfigError("got " + std::to_string(levels.size()) + " basis sizes for " +
                          std::to_string(p) + " inputs");
    }
    for (int L : out) {
        if (L < 1) throw ConfigError("every basis size must be at least 1");
    }
    return out;
}

int HofdBasis::total_functions() const {
    int m = 0;
    for (const auto& b : blocks) m += b.size();
    return m;
}

std::vector<int> HofdBasis::block_offsets() const {
    std::vector<int> off(blocks.size());
    int acc = 0;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        off[k] = acc;
        acc += blocks[k].size();
    }
    return off;
}

Eigen::MatrixXd HofdBasis::values_matrix() const {
    Eigen::MatrixXd M(sample_size, total_functions());
    Eigen::Index at = 0;
    for (const auto& b : blocks) {
        M.middleCols(at, b.size()) = b.values;
        at += b.size();
    }
    return M;
}

std::vector<std::string> HofdBasis::column_labels() const {
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(total_functions()));
    for (const auto& b : blocks) {
        const std::string base = b.subset.label() + ":";
        for (const auto& mi : b.multi_indices) {
            std::string s = base;
            for (std::size_t a = 0; a < mi.size(); ++a) {
                if (a) s += '.';
                s += std::to_string(mi[a] + 1);
            }
            labels.push_back(std::move(s));
        }
    }
    return labels;
}

HofdBasis build_hogs_basis(const Eigen::MatrixXd& X, const HogsConfig& config) {
    const int p = static_cast<int>(X.cols());
    const Eigen::Index n = X.rows();
    const std::vector<int> levels = config.resolved_levels(p);
    if (config.max_order > p) {
        throw ConfigError("interaction order " + std::to_string(config.max_order) +
                          " exceeds the " + std::to_string(p) + " inputs");
    }

    HofdBasis basis;
    basis.config = config;
    basis.config.levels = levels;
    basis.sample_size = n;
    basis.sample_checksum = matrix_checksum(X);
    basis.subsets = enumerate_subsets(p, config.max_order);

    for (int i = 0; i < p; ++i) {
        if (config.family == "hermite") {
            basis.univariate.push_back(hermite_system(X.col(i), levels[static_cast<std::size_t>(i)]));
        } else if (config.family == "bspline") {
            basis.univariate.push_back(bspline_system(X.col(i), levels[static_cast<std::size_t>(i)],
                                                      config.spline_degree));
        } else {
            throw ConfigError("unknown basis family '" + config.family + "'");
        }
    }

    // Dictionary layout: constant, then each subset's tensor atoms.
    std::vector<int> atom_offset(basis.subsets.size());
    int total_atoms = 0;
    std::vector<std::vector<std::vector<int>>> all_multi(basis.subsets.size());
    for (std::size_t k = 0; k < basis.subsets.size(); ++k) {
        std::vector<int> dims;
        for (int v : basis.subsets[k].vars) dims.push_back(levels[static_cast<std::size_t>(v)]);
        all_multi[k] = odometer(dims);
        atom_offset[k] = 1 + total_atoms;
        total_atoms += static_cast<int>(all_multi[k].size());
    }

    basis.blocks.resize(basis.subsets.size());
    for (std::size_t k = 0; k < basis.subsets.size(); ++k) {
        const SubsetIndex& u = basis.subsets[k];
        SubsetBlock block;
        block.subset = u;
        block.multi_indices = all_multi[k];
        const int m_u = static_cast<int>(all_multi[k].size());

        if (u.order() == 1) {
            // Univariate functions pass through: already orthonormal with
            // empirical mean zero, so no correction is needed.
            block.values = basis.univariate[static_cast<std::size_t>(u.vars[0])].values;
            block.expansion = Eigen::MatrixXd::Zero(m_u, 1 + total_atoms);
            for (int t = 0; t < m_u; ++t) block.expansion(t, atom_offset[k] + t) = 1.0;
            block.correction.resize(0, m_u);
            block.centering = Eigen::VectorXd::Zero(m_u);
            basis.blocks[k] = std::move(block);
            continue;
        }

        const std::vector<int> strict = strict_subset_positions(basis.subsets,
                                                                static_cast<int>(k));
        int S = 0;
        for (int v : strict) S += basis.blocks[static_cast<std::size_t>(v)].size();

        // Stack the strict-subset functions (centered: their means are zero up
        // to rounding; subtracting makes the constant constraint exact).
        Eigen::MatrixXd Psi(n, S);
        Eigen::VectorXd psi_mean(S);
        Eigen::MatrixXd lower_expansion(S, 1 + total_atoms);
        {
            Eigen::Index at = 0;
            for (int v : strict) {
                const auto& bv = basis.blocks[static_cast<std::size_t>(v)];
                Psi.middleCols(at, bv.size()) = bv.values;
                lower_expansion.middleRows(at, bv.size()) = bv.expansion;
                at += bv.size();
            }
        }
        for (int j = 0; j < S; ++j) {
            psi_mean[j] = Psi.col(j).mean();
            Psi.col(j).array() -= psi_mean[j];
        }

        Eigen::MatrixXd T = tensor_columns(value_pointers(basis.univariate), u, all_multi[k]);
        Eigen::VectorXd t_mean(m_u);
        for (int t = 0; t < m_u; ++t) {
            t_mean[t] = T.col(t).mean();
            T.col(t).array() -= t_mean[t];
        }

        // One correction system per subset, shared by all its tensor terms:
        // the lower-order Gram against the cross inner products.
        const Eigen::MatrixXd A = (Psi.transpose() * Psi) / static_cast<double>(n);
        const Eigen::MatrixXd D = -(Psi.transpose() * T) / static_cast<double>(n);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
        double rc = ldlt.rcond();
        if (ldlt.info() != Eigen::Success || !(rc > 1e-12)) {
            // The system matrix is a Gram matrix, so borderline failures come
            // from rounding; retry once with a tiny diagonal shift before
            // giving up.
            const double jitter = 1e-10 * A.trace() / static_cast<double>(S);
            Eigen::MatrixXd A_shifted = A;
            A_shifted.diagonal().array() += jitter;
            ldlt.compute(A_shifted);
            rc = ldlt.rcond();
            if (ldlt.info() != Eigen::Success || !(rc > 1e-12)) {
                std::ostringstream msg;
                msg << "correction system for subset {" << u.label()
                    << "} is numerically singular (reciprocal condition " << rc
                    << "); likely causes: sample too small, redundant basis functions, "
                       "or a near-constant input";
                throw NumericalError(msg.str());
            }
        }
        const Eigen::MatrixXd Lambda = ldlt.solve(D);  // S x m_u

        block.values = T + Psi * Lambda;
        // Constant that zeroes the empirical mean, folded into the flat
        // coefficients so out-of-sample evaluation reproduces these values.
        Eigen::VectorXd C = -(t_mean + Lambda.transpose() * psi_mean);
        block.expansion = Lambda.transpose() * lower_expansion;
        for (int t = 0; t < m_u; ++t) {
            block.expansion(t, 0) += C[t];
            block.expansion(t, atom_offset[k] + t) += 1.0;
        }
        block.correction = Lambda;
        block.centering = C;
        basis.blocks[k] = std::move(block);
    }
    return basis;
}

Eigen::MatrixXd evaluate_basis(const HofdBasis& basis, const Eigen::MatrixXd& Xnew) {
    const int p = static_cast<int>(basis.univariate.size());
    if (Xnew.cols() != p) {
        throw DataError("points have " + std::to_string(Xnew.cols()) + " columns, basis expects " +
                        std::to_string(p));
    }
    std::vector<Eigen::MatrixXd> eval_blocks;
    eval_blocks.reserve(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
        eval_blocks.push_back(basis.univariate[static_cast<std::size_t>(i)].evaluate(Xnew.col(i)));
    }
    std::vector<const Eigen::MatrixXd*> per_input;
    per_input.reserve(eval_blocks.size());
    for (const auto& b : eval_blocks) per_input.push_back(&b);

    // Tensor-atom dictionary at the new points, then the stored flat
    // coefficients map atoms to basis functions.
    const Eigen::Index total_atoms = basis.blocks.empty()
                                         ? 0
                                         : basis.blocks[0].expansion.cols() - 1;
    Eigen::MatrixXd dict(Xnew.rows(), 1 + total_atoms);
    dict.col(0).setOnes();
    Eigen::Index at = 1;
    for (std::size_t k = 0; k < basis.subsets.size(); ++k) {
        const auto& block = basis.blocks[k];
        Eigen::MatrixXd atoms = tensor_columns(per_input, block.subset, block.multi_indices);
        dict.middleCols(at, atoms.cols()) = atoms;
        at += atoms.cols();
    }

    Eigen::MatrixXd out(Xnew.rows(), basis.total_functions());
    Eigen::Index col = 0;
    for (const auto& block : basis.blocks) {
        out.middleCols(col, block.size()) = dict * block.expansion.transpose();
        col += block.size();
    }
    return out;
}

namespace {

double max_violation(const HofdBasis& basis, const Eigen::MatrixXd& values) {
    const double n = static_cast<double>(values.rows());
    const auto offsets = basis.block_offsets();
    Eigen::VectorXd norms(values.cols());
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
        norms[j] = std::max(values.col(j).norm() / std::sqrt(n), 1e-300);
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < basis.subsets.size(); ++k) {
        const auto& bu = basis.blocks[k];
        const int off_u = offsets[k];
        // against the constant
        for (int t = 0; t < bu.size(); ++t) {
            const double mean = values.col(off_u + t).mean();
            worst = std::max(worst, std::abs(mean) / norms[off_u + t]);
        }
        for (int v : strict_subset_positions(basis.subsets, static_cast<int>(k))) {
            const auto& bv = basis.blocks[static_cast<std::size_t>(v)];
            const int off_v = offsets[static_cast<std::size_t>(v)];
            const Eigen::MatrixXd cross =
                values.middleCols(off_u, bu.size()).transpose() *
                values.middleCols(off_v, bv.size()) / n;
            for (int a = 0; a < bu.size(); ++a) {
                for (int b = 0; b < bv.size(); ++b) {
                    worst = std::max(worst, std::abs(cross(a, b)) /
                                                (norms[off_u + a] * norms[off_v + b]));
                }
            }
        }
    }
    return worst;
}

}  // namespace

double check_hierarchical_orthogonality(const HofdBasis& basis) {
    return max_violation(basis, basis.values_matrix());
}

double check_hierarchical_orthogonality(const HofdBasis& basis, const Eigen::MatrixXd& X) {
    return max_violation(basis, evaluate_basis(basis, X));
}

GramMatrix gram_matrix(const Eigen::MatrixXd& design, bool require_invertible) {
    GramMatrix gram;
    gram.G = (design.transpose() * design) / static_cast<double>(design.rows());
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram.G);
    gram.rcond = ldlt.info() == Eigen::Success ? ldlt.rcond() : 0.0;
    gram.ill_conditioned = !(gram.rcond > 1e-12);
    if (require_invertible && gram.ill_conditioned) {
        std::ostringstream msg;
        msg << "Gram matrix is numerically singular (reciprocal condition " << gram.rcond
            << ", " << design.rows() << " rows for " << design.cols() << " columns)";
        throw NumericalError(msg.str());
    }
    return gram;
}

}  // namespace hofd
