#include "hdrl/approximator.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace hdrl {

MlpHead::MlpHead(int in_dim, int out_dim, int hidden, std::uint64_t seed,
                 double init_scale, double init_output_bias)
    : in_dim_(in_dim), out_dim_(out_dim), hidden_(hidden) {
    if (in_dim <= 0 || out_dim <= 0 || hidden < 0)
        throw std::invalid_argument("bad head dimensions");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-init_scale, init_scale);
    auto fill = [&](MatrixXd& m) {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = uni(rng);
    };
    if (hidden_ > 0) {
        w1_.resize(hidden_, in_dim_);
        b1_.resize(hidden_);
        w2_.resize(out_dim_, hidden_);
        fill(w1_);
        for (Eigen::Index i = 0; i < b1_.size(); ++i) b1_(i) = uni(rng);
        fill(w2_);
    } else {
        w2_.resize(out_dim_, in_dim_);
        fill(w2_);
    }
    b2_ = VectorXd::Constant(out_dim_, init_output_bias);
}

void MlpHead::check_input(const VectorXd& input) const {
    if (input.size() != in_dim_)
        throw std::invalid_argument("feature length does not match head input");
}

VectorXd MlpHead::forward(const VectorXd& input) const {
    check_input(input);
    if (hidden_ == 0) return w2_ * input + b2_;
    VectorXd h = (w1_ * input + b1_).array().tanh();
    return w2_ * h + b2_;
}

VectorXd MlpHead::backward(const VectorXd& input,
                           const VectorXd& out_grad) const {
    check_input(input);
    if (out_grad.size() != out_dim_)
        throw std::invalid_argument("output cotangent length mismatch");
    VectorXd grad(param_count());
    Eigen::Index at = 0;
    if (hidden_ == 0) {
        MatrixXd dw2 = out_grad * input.transpose();
        grad.segment(at, dw2.size()) =
            Eigen::Map<const VectorXd>(dw2.data(), dw2.size());
        at += dw2.size();
        grad.segment(at, out_dim_) = out_grad;
        return grad;
    }
    VectorXd h = (w1_ * input + b1_).array().tanh();
    VectorXd dz = (w2_.transpose() * out_grad).array() *
                  (1.0 - h.array().square());
    MatrixXd dw1 = dz * input.transpose();
    MatrixXd dw2 = out_grad * h.transpose();
    grad.segment(at, dw1.size()) =
        Eigen::Map<const VectorXd>(dw1.data(), dw1.size());
    at += dw1.size();
    grad.segment(at, hidden_) = dz;
    at += hidden_;
    grad.segment(at, dw2.size()) =
        Eigen::Map<const VectorXd>(dw2.data(), dw2.size());
    at += dw2.size();
    grad.segment(at, out_dim_) = out_grad;
    return grad;
}

int MlpHead::param_count() const {
    if (hidden_ == 0) return out_dim_ * in_dim_ + out_dim_;
    return hidden_ * in_dim_ + hidden_ + out_dim_ * hidden_ + out_dim_;
}

VectorXd MlpHead::params() const {
    VectorXd flat(param_count());
    Eigen::Index at = 0;
    if (hidden_ > 0) {
        flat.segment(at, w1_.size()) =
            Eigen::Map<const VectorXd>(w1_.data(), w1_.size());
        at += w1_.size();
        flat.segment(at, b1_.size()) = b1_;
        at += b1_.size();
    }
    flat.segment(at, w2_.size()) =
        Eigen::Map<const VectorXd>(w2_.data(), w2_.size());
    at += w2_.size();
    flat.segment(at, b2_.size()) = b2_;
    return flat;
}

void MlpHead::set_params(const VectorXd& flat) {
    if (flat.size() != param_count())
        throw std::invalid_argument("flat parameter length mismatch");
    Eigen::Index at = 0;
    if (hidden_ > 0) {
        Eigen::Map<VectorXd>(w1_.data(), w1_.size()) =
            flat.segment(at, w1_.size());
        at += w1_.size();
        b1_ = flat.segment(at, b1_.size());
        at += b1_.size();
    }
    Eigen::Map<VectorXd>(w2_.data(), w2_.size()) =
        flat.segment(at, w2_.size());
    at += w2_.size();
    b2_ = flat.segment(at, b2_.size());
}

void MlpHead::add_to_params(const VectorXd& flat_step) {
    set_params(params() + flat_step);
}

void MlpHead::save(std::ostream& os, const std::string& name) const {
    os << "hdrl-head 1\n";
    os << "name " << name << '\n';
    os << "shape " << in_dim_ << ' ' << hidden_ << ' ' << out_dim_ << '\n';
    VectorXd flat = params();
    os << "params " << flat.size() << '\n';
    os.precision(17);
    for (Eigen::Index i = 0; i < flat.size(); ++i) os << flat(i) << '\n';
}

MlpHead MlpHead::load(std::istream& is, std::string* name) {
    std::string magic;
    int version = 0;
    is >> magic >> version;
    if (magic != "hdrl-head" || version != 1)
        throw std::runtime_error("not a head snapshot");
    std::string key, head_name;
    is >> key >> head_name;
    if (key != "name") throw std::runtime_error("malformed head snapshot");
    int in = 0, hidden = 0, out = 0;
    is >> key >> in >> hidden >> out;
    if (key != "shape") throw std::runtime_error("malformed head snapshot");
    Eigen::Index n = 0;
    is >> key >> n;
    if (key != "params") throw std::runtime_error("malformed head snapshot");
    MlpHead head(in, out, hidden, /*seed=*/0);
    if (n != head.param_count())
        throw std::runtime_error("snapshot parameter count mismatch");
    VectorXd flat(n);
    for (Eigen::Index i = 0; i < n; ++i) is >> flat(i);
    if (!is) throw std::runtime_error("truncated head snapshot");
    head.set_params(flat);
    if (name) *name = head_name;
    return head;
}

Critic::Output Critic::forward(const VectorXd& features) const {
    double raw = net_.forward(features)(0);
    return {raw, std::max(0.0, raw)};
}

void Critic::update(const VectorXd& features, double delta, double lr) {
    if (!std::isfinite(delta)) throw std::invalid_argument("non-finite delta");
    double raw = net_.forward(features)(0);
    if (raw < 0.0) return;  // dead rectifier, subgradient zero
    VectorXd one = VectorXd::Ones(1);
    net_.add_to_params(lr * delta * net_.backward(features, one));
}

VectorXd Policy::action_probs(const VectorXd& features) const {
    VectorXd scores = net_.forward(features);
    VectorXd shifted = scores.array() - scores.maxCoeff();
    VectorXd expd = shifted.array().exp();
    return expd / expd.sum();
}

void Policy::update(const VectorXd& features, int action, double advantage,
                    double lr) {
    if (!std::isfinite(advantage))
        throw std::invalid_argument("non-finite advantage");
    if (action < 0 || action >= num_actions())
        throw std::invalid_argument("action id out of range");
    VectorXd probs = action_probs(features);
    // d log pi(a) / d score_j = [a == j] - pi_j
    VectorXd out_grad = -probs;
    out_grad(action) += 1.0;
    net_.add_to_params(lr * advantage * net_.backward(features, out_grad));
}

double finite_diff_check(const MlpHead& head, const VectorXd& features,
                         const VectorXd& out_grad, double epsilon) {
    MlpHead probe = head;
    VectorXd base = head.params();
    VectorXd analytic = head.backward(features, out_grad);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < base.size(); ++i) {
        VectorXd p = base;
        p(i) = base(i) + epsilon;
        probe.set_params(p);
        double plus = out_grad.dot(probe.forward(features));
        p(i) = base(i) - epsilon;
        probe.set_params(p);
        double minus = out_grad.dot(probe.forward(features));
        double numeric = (plus - minus) / (2.0 * epsilon);
        double denom = std::max({1.0, std::abs(analytic(i)), std::abs(numeric)});
        worst = std::max(worst, std::abs(analytic(i) - numeric) / denom);
    }
    return worst;
}

}  // namespace hdrl
