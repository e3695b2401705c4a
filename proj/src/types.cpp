#include "hofd/types.hpp"

#include <cmath>

#include "hofd/errors.hpp"

namespace hofd {

void Sample::validate() const {
    if (n() < 2) {
        throw DataError("sample needs at least 2 rows, got " + std::to_string(n()));
    }
    if (!X.allFinite()) {
        throw DataError("sample inputs contain non-finite entries");
    }
    if (has_response && !y.allFinite()) {
        throw DataError("sample response contains non-finite entries");
    }
    for (Eigen::Index j = 0; j < p(); ++j) {
        const double lo = X.col(j).minCoeff();
        const double hi = X.col(j).maxCoeff();
        if (hi - lo <= 0.0) {
            throw DataError("input column " + std::to_string(j + 1) +
                            " is constant; it carries no variance to decompose");
        }
    }
}

}  // namespace hofd
