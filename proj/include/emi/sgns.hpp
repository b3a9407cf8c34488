#pragma once

#include <cmath>
#include <span>

#include <Eigen/Dense>

// Skip-gram negative-sampling objective for a single (center, context, negatives)
// tuple. `center` is the center word's input vector, `context` the context
// word's output vector, and each row of `negatives` a sampled output vector.
//
//   loss = -log s(context . center) - sum_k log s(-negative_k . center)
//
// The trainer applies exactly the descent step on this loss.
namespace emi::embeddings {

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

template <typename Scalar>
Scalar sigmoid(Scalar x) {
    if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-x));
    const Scalar e = std::exp(x);
    return e / (Scalar(1) + e);
}

// log s(x), stable for large |x|.
template <typename Scalar>
Scalar log_sigmoid(Scalar x) {
    if (x >= Scalar(0)) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

template <typename CenterT, typename ContextT, typename NegT>
typename CenterT::Scalar sgns_loss(const Eigen::MatrixBase<CenterT>& center,
                                   const Eigen::MatrixBase<ContextT>& context,
                                   const Eigen::MatrixBase<NegT>& negatives) {
    using Scalar = typename CenterT::Scalar;
    Scalar loss = -log_sigmoid<Scalar>(context.dot(center));
    for (Eigen::Index k = 0; k < negatives.rows(); ++k)
        loss -= log_sigmoid<Scalar>(-negatives.row(k).dot(center));
    return loss;
}

template <typename Scalar>
struct SgnsGradient {
    RowVector<Scalar> center;
    RowVector<Scalar> context;
    RowMatrix<Scalar> negatives;
};

template <typename CenterT, typename ContextT, typename NegT>
SgnsGradient<typename CenterT::Scalar> sgns_gradient(const Eigen::MatrixBase<CenterT>& center,
                                                     const Eigen::MatrixBase<ContextT>& context,
                                                     const Eigen::MatrixBase<NegT>& negatives) {
    using Scalar = typename CenterT::Scalar;
    SgnsGradient<Scalar> g;
    const Scalar pos = sigmoid<Scalar>(context.dot(center)) - Scalar(1);
    g.center = pos * context;
    g.context = pos * center;
    g.negatives.resize(negatives.rows(), negatives.cols());
    for (Eigen::Index k = 0; k < negatives.rows(); ++k) {
        const Scalar neg = sigmoid<Scalar>(negatives.row(k).dot(center));
        g.center += neg * negatives.row(k);
        g.negatives.row(k) = neg * center;
    }
    return g;
}

// In-place descent step of size `alpha` on rows of the input/output matrices.
// Output rows are updated as they are visited while the center update is
// accumulated in `scratch` from the pre-update output rows, so for distinct
// targets the result equals params - alpha * sgns_gradient(params).
// Negatives equal to `context` are skipped.
template <typename Scalar>
void sgns_step(RowMatrix<Scalar>& input, RowMatrix<Scalar>& output, Eigen::Index center,
               Eigen::Index context, std::span<const Eigen::Index> negatives, Scalar alpha,
               RowVector<Scalar>& scratch) {
    auto v = input.row(center);
    scratch.setZero(input.cols());
    auto visit = [&](Eigen::Index target, Scalar label) {
        auto u = output.row(target);
        const Scalar g = (label - sigmoid<Scalar>(u.dot(v))) * alpha;
        scratch.noalias() += g * u;
        u.noalias() += g * v;
    };
    visit(context, Scalar(1));
    for (Eigen::Index neg : negatives) {
        if (neg == context) continue;
        visit(neg, Scalar(0));
    }
    v += scratch;
}

}  // namespace emi::embeddings
