#pragma once

// Charts, smooth maps between them, Jacobians and pushforwards.
// A SmoothFn is evaluable at jet depths 0..3 through one virtual
// interface, so functions assembled from expressions, compositions and
// tangent lifts can be differentiated by seeding dual parts at any
// supported nesting level.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fnbrack/expr.hpp"
#include "fnbrack/jet.hpp"
#include "fnbrack/linalg.hpp"

namespace fnbrack {

struct Chart {
    int dim = 0;
    std::string name;
    Vec box_lo;  // sampling box
    Vec box_hi;
    std::shared_ptr<const expr::ExprFn> domain;  // optional; inside iff all components >= 0

    // Chart with sampling box [-1,1]^dim.
    static Chart cube(int dim, std::string name);
    static Chart box(int dim, std::string name, Vec lo, Vec hi);

    bool contains(const Vec& p) const;
};

Chart product_chart(const Chart& a, const Chart& b, const std::string& name);
Chart tangent_chart(const Chart& c);            // (x, v)
Chart whitney_chart(const Chart& c, int slots); // (x, v_1..v_k)

struct PointVec {
    Vec base;
    Vec vec;
};

class SmoothFn {
public:
    virtual ~SmoothFn() = default;
    virtual int arity_in() const = 0;
    virtual int arity_out() const = 0;
    virtual void eval(std::span<const double> in, std::span<double> out) const = 0;
    virtual void eval(std::span<const Jet1> in, std::span<Jet1> out) const = 0;
    virtual void eval(std::span<const Jet2> in, std::span<Jet2> out) const = 0;
    virtual void eval(std::span<const Jet3> in, std::span<Jet3> out) const = 0;
};

using SmoothFnPtr = std::shared_ptr<const SmoothFn>;

template <class Derived>
class SmoothFnCRTP : public SmoothFn {
public:
    void eval(std::span<const double> in, std::span<double> out) const final
    { static_cast<const Derived&>(*this).template run<double>(in, out); }
    void eval(std::span<const Jet1> in, std::span<Jet1> out) const final
    { static_cast<const Derived&>(*this).template run<Jet1>(in, out); }
    void eval(std::span<const Jet2> in, std::span<Jet2> out) const final
    { static_cast<const Derived&>(*this).template run<Jet2>(in, out); }
    void eval(std::span<const Jet3> in, std::span<Jet3> out) const final
    { static_cast<const Derived&>(*this).template run<Jet3>(in, out); }
};

// For combinators that raise the jet depth internally (they need one
// nesting level of headroom, so depth 3 inputs are out of reach).
template <class Derived>
class SmoothFnCRTPDepthRaising : public SmoothFn {
public:
    void eval(std::span<const double> in, std::span<double> out) const final
    { static_cast<const Derived&>(*this).template run<double>(in, out); }
    void eval(std::span<const Jet1> in, std::span<Jet1> out) const final
    { static_cast<const Derived&>(*this).template run<Jet1>(in, out); }
    void eval(std::span<const Jet2> in, std::span<Jet2> out) const final
    { static_cast<const Derived&>(*this).template run<Jet2>(in, out); }
    void eval(std::span<const Jet3>, std::span<Jet3>) const final
    { throw JetDepthError("jet nesting depth exceeded (max 3)"); }
};

template <class F>
class LambdaFn final : public SmoothFnCRTP<LambdaFn<F>> {
public:
    LambdaFn(int in, int out, F f) : in_(in), out_(out), f_(std::move(f)) {}
    int arity_in() const override { return in_; }
    int arity_out() const override { return out_; }
    template <class S>
    void run(std::span<const S> in, std::span<S> out) const { f_(in, out); }

private:
    int in_;
    int out_;
    F f_;
};

// f must be callable as f(std::span<const S>, std::span<S>) for every jet depth.
template <class F>
SmoothFnPtr fn_from_lambda(int in, int out, F f)
{
    return std::make_shared<LambdaFn<F>>(in, out, std::move(f));
}

SmoothFnPtr fn_from_expr(expr::ExprFn fn);
SmoothFnPtr fn_compose(SmoothFnPtr outer, SmoothFnPtr inner);
SmoothFnPtr fn_stack(std::vector<SmoothFnPtr> parts);  // shared input, concatenated outputs
SmoothFnPtr fn_select(std::vector<int> indices, int in_dim);
SmoothFnPtr fn_constant(Vec values, int in_dim);
SmoothFnPtr fn_linear(Mat m, Vec offset);
SmoothFnPtr fn_identity(int dim);

// (x, v) -> (f(x), Df(x) v)
SmoothFnPtr fn_tangent_lift(SmoothFnPtr f);
// (x, v_1..v_k) -> (f(x), Df(x) v_1, ..., Df(x) v_k)
SmoothFnPtr fn_whitney_lift(SmoothFnPtr f, int slots);

struct SmoothMap {
    Chart source;
    Chart target;
    SmoothFnPtr fn;

    Vec apply(const Vec& p) const;
    Mat jacobian(const Vec& p) const;
    PointVec pushforward(const PointVec& pv) const;
};

SmoothMap map_from_exprs(Chart source, Chart target, std::string_view text);
SmoothMap map_identity(Chart c);
SmoothMap compose(const SmoothMap& outer, const SmoothMap& inner);
SmoothMap tangent_map(const SmoothMap& f);
SmoothMap whitney_map(const SmoothMap& f, int slots);

}  // namespace fnbrack
