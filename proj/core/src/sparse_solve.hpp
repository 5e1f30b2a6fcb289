#pragma once

// Internal Eigen-backed sparse solves.  Kept out of the public headers so the
// installed interface stays dependency-free.

#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "hexcube/errors.hpp"
#include "hexcube/sphere_map.hpp"

namespace hexcube::detail {

// LDLT factorization of a symmetric positive semidefinite matrix whose only
// nullspace is the constant vector; one row/column is pinned to the identity,
// which yields an exact solution for compatible right-hand sides.
class PinnedSpdSolver {
public:
    PinnedSpdSolver(int n, const std::vector<Eigen::Triplet<double>>& triplets, int pin)
        : n_(n), pin_(pin) {
        std::vector<Eigen::Triplet<double>> kept;
        kept.reserve(triplets.size() + 1);
        for (const auto& t : triplets) {
            if (t.row() == pin || t.col() == pin) continue;
            kept.push_back(t);
        }
        kept.emplace_back(pin, pin, 1.0);
        Eigen::SparseMatrix<double> m(n, n);
        m.setFromTriplets(kept.begin(), kept.end());
        ldlt_.compute(m);
        if (ldlt_.info() != Eigen::Success)
            throw SolverFailure("sparse LDLT factorization failed");
    }

    PinnedSpdSolver(const CotangentSystem& sys, int pin)
        : PinnedSpdSolver(sys.size, csr_triplets(sys), pin) {}

    std::vector<double> solve(const std::vector<double>& rhs) const {
        Eigen::VectorXd b(n_);
        for (int i = 0; i < n_; ++i) b[i] = rhs[i];
        b[pin_] = 0.0;
        Eigen::VectorXd x = ldlt_.solve(b);
        if (ldlt_.info() != Eigen::Success) throw SolverFailure("sparse LDLT solve failed");
        return std::vector<double>(x.data(), x.data() + n_);
    }

private:
    static std::vector<Eigen::Triplet<double>> csr_triplets(const CotangentSystem& sys) {
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(sys.val.size());
        for (int r = 0; r < sys.size; ++r)
            for (int p = sys.row_ptr[r]; p < sys.row_ptr[r + 1]; ++p)
                t.emplace_back(r, sys.col[p], sys.val[p]);
        return t;
    }

    int n_;
    int pin_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

}  // namespace hexcube::detail
