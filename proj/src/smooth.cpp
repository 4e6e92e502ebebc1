#include "fnbrack/smooth.hpp"

#include <utility>

namespace fnbrack {

Chart Chart::cube(int dim, std::string name)
{
    if (dim < 0) throw DimensionError("Chart::cube: negative dimension");
    Chart c;
    c.dim = dim;
    c.name = std::move(name);
    c.box_lo.assign(dim, -1.0);
    c.box_hi.assign(dim, 1.0);
    return c;
}

Chart Chart::box(int dim, std::string name, Vec lo, Vec hi)
{
    if (static_cast<int>(lo.size()) != dim || static_cast<int>(hi.size()) != dim)
        throw DimensionError("Chart::box: bounds do not match dim");
    Chart c;
    c.dim = dim;
    c.name = std::move(name);
    c.box_lo = std::move(lo);
    c.box_hi = std::move(hi);
    return c;
}

bool Chart::contains(const Vec& p) const
{
    if (static_cast<int>(p.size()) != dim) return false;
    if (!domain) return true;
    Vec out(domain->arity_out);
    expr::evaluate(*domain, std::span<const double>(p), std::span<double>(out));
    for (double v : out)
        if (v < 0.0) return false;
    return true;
}

Chart product_chart(const Chart& a, const Chart& b, const std::string& name)
{
    Chart c;
    c.dim = a.dim + b.dim;
    c.name = name;
    c.box_lo = a.box_lo;
    c.box_lo.insert(c.box_lo.end(), b.box_lo.begin(), b.box_lo.end());
    c.box_hi = a.box_hi;
    c.box_hi.insert(c.box_hi.end(), b.box_hi.begin(), b.box_hi.end());
    return c;
}

Chart tangent_chart(const Chart& c) { return whitney_chart(c, 1); }

Chart whitney_chart(const Chart& c, int slots)
{
    Chart t;
    t.dim = c.dim * (1 + slots);
    t.name = slots == 1 ? "T" + c.name : "W" + std::to_string(slots) + c.name;
    t.box_lo = c.box_lo;
    t.box_hi = c.box_hi;
    for (int s = 0; s < slots; ++s)
        for (int i = 0; i < c.dim; ++i) {
            t.box_lo.push_back(-1.0);
            t.box_hi.push_back(1.0);
        }
    return t;
}

namespace {

class ExprNodeFn final : public SmoothFnCRTP<ExprNodeFn> {
public:
    explicit ExprNodeFn(expr::ExprFn fn) : fn_(std::move(fn)) {}
    int arity_in() const override { return fn_.arity_in; }
    int arity_out() const override { return fn_.arity_out; }
    template <class S>
    void run(std::span<const S> in, std::span<S> out) const { expr::evaluate(fn_, in, out); }

private:
    expr::ExprFn fn_;
};

class ComposeFn final : public SmoothFnCRTP<ComposeFn> {
public:
    ComposeFn(SmoothFnPtr outer, SmoothFnPtr inner)
        : outer_(std::move(outer)), inner_(std::move(inner))
    {
        if (inner_->arity_out() != outer_->arity_in())
            throw DimensionError("fn_compose: arity mismatch");
    }
    int arity_in() const override { return inner_->arity_in(); }
    int arity_out() const override { return outer_->arity_out(); }
    template <class S>
    void run(std::span<const S> in, std::span<S> out) const
    {
        std::vector<S> mid(inner_->arity_out());
        inner_->eval(in, std::span<S>(mid));
        outer_->eval(std::span<const S>(mid), out);
    }

private:
    SmoothFnPtr outer_;
    SmoothFnPtr inner_;
};

class StackFn final : public SmoothFnCRTP<StackFn> {
public:
    explicit StackFn(std::vector<SmoothFnPtr> parts) : parts_(std::move(parts))
    {
        if (parts_.empty()) throw DimensionError("fn_stack: empty");
        in_ = parts_[0]->arity_in();
        out_ = 0;
        for (const auto& p : parts_) {
            if (p->arity_in() != in_) throw DimensionError("fn_stack: input arity mismatch");
            out_ += p->arity_out();
        }
    }
    int arity_in() const override { return in_; }
    int arity_out() const override { return out_; }
    template <class S>
    void run(std::span<const S> in, std::span<S> out) const
    {
        int off = 0;
        for (const auto& p : parts_) {
            p->eval(in, out.subspan(off, p->arity_out()));
            off += p->arity_out();
        }
    }

private:
    std::vector<SmoothFnPtr> parts_;
    int in_ = 0;
    int out_ = 0;
};

class SelectFn final : public SmoothFnCRTP<SelectFn> {
public:
    SelectFn(std::vector<int> idx, int in_dim) : idx_(std::move(idx)), in_(in_dim)
    {
        for (int i : idx_)
            if (i < 0 || i >= in_dim) throw DimensionError("fn_select: index out of range");
    }
    int arity_in() const override { return in_; }
    int arity_out() const override { return static_cast<int>(idx_.size()); }
    template <class S>
    void run(std::span<const S> in, std::span<S> out) const
    {
        for (size_t k = 0; k < idx_.size(); ++k) out[k] = in[idx_[k]];
    }

private:
    std::vector<int> idx_;
    int in_;
};

class ConstantFn final : public SmoothFnCRTP<ConstantFn> {
public:
    ConstantFn(Vec values, int in_dim) : values_(std::move(values)), in_(in_dim) {}
    int arity_in() const override { return in_; }
    int arity_out() const override { return static_cast<int>(values_.size()); }
    template <class S>
    void run(std::span<const S>, std::span<S> out) const
    {
        for (size_t k = 0; k < values_.size(); ++k) out[k] = from_real<S>(values_[k]);
    }

private:
    Vec values_;
    int in_;
};

class LinearFn final : public SmoothFnCRTP<LinearFn> {
public:
    LinearFn(Mat m, Vec offset) : m_(std::move(m)), b_(std::move(offset))
    {
        if (static_cast<int>(b_.size()) != m_.rows) throw DimensionError("fn_linear: offset size");
    }
    int arity_in() const override { return m_.cols; }
    int arity_out() const override { return m_.rows; }
    template <class S>
    void run(std::span<const S> in, std::span<S> out) const
    {
        for (int i = 0; i < m_.rows; ++i) {
            S acc = from_real<S>(b_[i]);
            for (int j = 0; j < m_.cols; ++j) acc = acc + m_(i, j) * in[j];
            out[i] = acc;
        }
    }

private:
    Mat m_;
    Vec b_;
};

class WhitneyLiftFn final : public SmoothFnCRTPDepthRaising<WhitneyLiftFn> {
public:
    WhitneyLiftFn(SmoothFnPtr f, int slots) : f_(std::move(f)), slots_(slots)
    {
        if (slots_ < 1) throw DimensionError("fn_whitney_lift: slots < 1");
    }
    int arity_in() const override { return f_->arity_in() * (1 + slots_); }
    int arity_out() const override { return f_->arity_out() * (1 + slots_); }
    template <class S>
    void run(std::span<const S> in, std::span<S> out) const
    {
        const int n = f_->arity_in();
        const int m = f_->arity_out();
        std::vector<Dual<S>> x(n), y(m);
        for (int slot = 0; slot < slots_; ++slot) {
            for (int i = 0; i < n; ++i) x[i] = Dual<S>(in[i], in[(1 + slot) * n + i]);
            f_->eval(std::span<const Dual<S>>(x), std::span<Dual<S>>(y));
            if (slot == 0)
                for (int i = 0; i < m; ++i) out[i] = y[i].v;
            for (int i = 0; i < m; ++i) out[(1 + slot) * m + i] = y[i].d;
        }
    }

private:
    SmoothFnPtr f_;
    int slots_;
};

}  // namespace

SmoothFnPtr fn_from_expr(expr::ExprFn fn) { return std::make_shared<ExprNodeFn>(std::move(fn)); }

SmoothFnPtr fn_compose(SmoothFnPtr outer, SmoothFnPtr inner)
{
    return std::make_shared<ComposeFn>(std::move(outer), std::move(inner));
}

SmoothFnPtr fn_stack(std::vector<SmoothFnPtr> parts)
{
    return std::make_shared<StackFn>(std::move(parts));
}

SmoothFnPtr fn_select(std::vector<int> indices, int in_dim)
{
    return std::make_shared<SelectFn>(std::move(indices), in_dim);
}

SmoothFnPtr fn_constant(Vec values, int in_dim)
{
    return std::make_shared<ConstantFn>(std::move(values), in_dim);
}

SmoothFnPtr fn_linear(Mat m, Vec offset)
{
    return std::make_shared<LinearFn>(std::move(m), std::move(offset));
}

SmoothFnPtr fn_identity(int dim)
{
    std::vector<int> idx(dim);
    for (int i = 0; i < dim; ++i) idx[i] = i;
    return fn_select(std::move(idx), dim);
}

SmoothFnPtr fn_tangent_lift(SmoothFnPtr f) { return fn_whitney_lift(std::move(f), 1); }

SmoothFnPtr fn_whitney_lift(SmoothFnPtr f, int slots)
{
    return std::make_shared<WhitneyLiftFn>(std::move(f), slots);
}

SmoothMap map_from_exprs(Chart source, Chart target, std::string_view text)
{
    auto fn = expr::parse(text, source.dim);
    if (fn.arity_out != target.dim)
        throw DimensionError("map_from_exprs: component count does not match target dim");
    return {std::move(source), std::move(target), fn_from_expr(std::move(fn))};
}

SmoothMap map_identity(Chart c)
{
    auto fn = fn_identity(c.dim);
    return {c, std::move(c), std::move(fn)};
}

SmoothMap compose(const SmoothMap& outer, const SmoothMap& inner)
{
    if (inner.target.dim != outer.source.dim)
        throw DimensionError("compose: chart mismatch");
    return {inner.source, outer.target, fn_compose(outer.fn, inner.fn)};
}

SmoothMap tangent_map(const SmoothMap& f)
{
    return {tangent_chart(f.source), tangent_chart(f.target), fn_tangent_lift(f.fn)};
}

SmoothMap whitney_map(const SmoothMap& f, int slots)
{
    return {whitney_chart(f.source, slots), whitney_chart(f.target, slots),
            fn_whitney_lift(f.fn, slots)};
}

Vec SmoothMap::apply(const Vec& p) const
{
    if (static_cast<int>(p.size()) != source.dim) throw DimensionError("apply: wrong point dim");
    if (!source.contains(p)) throw DomainViolation("apply: point outside chart domain");
    Vec out(target.dim);
    fn->eval(std::span<const double>(p), std::span<double>(out));
    return out;
}

Mat SmoothMap::jacobian(const Vec& p) const
{
    const int n = source.dim, m = target.dim;
    if (static_cast<int>(p.size()) != n) throw DimensionError("jacobian: wrong point dim");
    Mat j(m, n);
    std::vector<Jet1> x(n), y(m);
    for (int c = 0; c < n; ++c) {
        for (int i = 0; i < n; ++i) x[i] = Jet1(p[i], i == c ? 1.0 : 0.0);
        fn->eval(std::span<const Jet1>(x), std::span<Jet1>(y));
        for (int r = 0; r < m; ++r) j(r, c) = y[r].d;
    }
    return j;
}

PointVec SmoothMap::pushforward(const PointVec& pv) const
{
    const int n = source.dim, m = target.dim;
    if (static_cast<int>(pv.base.size()) != n || static_cast<int>(pv.vec.size()) != n)
        throw DimensionError("pushforward: wrong dims");
    if (!source.contains(pv.base)) throw DomainViolation("pushforward: point outside domain");
    std::vector<Jet1> x(n), y(m);
    for (int i = 0; i < n; ++i) x[i] = Jet1(pv.base[i], pv.vec[i]);
    fn->eval(std::span<const Jet1>(x), std::span<Jet1>(y));
    PointVec out;
    out.base.resize(m);
    out.vec.resize(m);
    for (int i = 0; i < m; ++i) {
        out.base[i] = y[i].v;
        out.vec[i] = y[i].d;
    }
    return out;
}

}  // namespace fnbrack
