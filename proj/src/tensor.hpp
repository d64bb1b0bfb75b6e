#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstring>
#include <functional>
#include <initializer_list>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "parallel.hpp"

namespace cipherlab {

class ShapeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Shape = std::vector<std::size_t>;

inline std::size_t shape_numel(const Shape& s) {
    std::size_t n = 1;
    for (auto e : s) n *= e;
    return n;
}

inline std::string shape_str(const Shape& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(s[i]);
    }
    return out + "]";
}

template <class T> class Tape;

// Dense row-major tensor. Values are immutable once constructed; a tensor
// either is a free constant or is bound to a node of the tape that produced
// it. Copies share storage.
template <class T>
class Tensor {
public:
    Tensor() = default;

    Tensor(Shape shape, std::vector<T> values)
        : values_(std::make_shared<const std::vector<T>>(std::move(values))),
          shape_(std::move(shape)) {
        if (values_->size() != shape_numel(shape_))
            throw ShapeError("tensor: " + std::to_string(values_->size()) +
                             " values for shape " + shape_str(shape_));
        for (const T& v : *values_)
            if (!std::isfinite(static_cast<double>(v)))
                throw NumericError("tensor: non-finite element");
    }

    static Tensor scalar(T v) { return Tensor(Shape{1}, std::vector<T>{v}); }
    static Tensor zeros(Shape shape) {
        std::size_t n = shape_numel(shape);
        return Tensor(std::move(shape), std::vector<T>(n, T(0)));
    }
    static Tensor full(Shape shape, T v) {
        std::size_t n = shape_numel(shape);
        return Tensor(std::move(shape), std::vector<T>(n, v));
    }

    bool defined() const { return static_cast<bool>(values_); }
    const Shape& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t extent(std::size_t axis) const { return shape_.at(axis); }
    std::size_t size() const { return values_ ? values_->size() : 0; }
    const T* data() const { return values_->data(); }
    const std::vector<T>& values() const { return *values_; }

    T item() const {
        if (size() != 1) throw ShapeError("item: tensor has " + std::to_string(size()) + " elements");
        return (*values_)[0];
    }

    Tape<T>* tape() const { return tape_; }
    int node() const { return node_; }
    bool on_tape() const { return tape_ != nullptr; }

    // Value with the tape binding dropped.
    Tensor detached() const {
        Tensor t = *this;
        t.tape_ = nullptr;
        t.node_ = -1;
        return t;
    }

private:
    std::shared_ptr<const std::vector<T>> values_;
    Shape shape_;
    Tape<T>* tape_ = nullptr;
    int node_ = -1;

    friend class Tape<T>;
};

enum class TapeMode { first_order, higher_order };

// Records primitive operations in topological order. In higher_order mode
// the reverse pass re-enters the recorder, so gradients are themselves
// differentiable tape values (needed for the gradient-penalty term).
template <class T>
class Tape {
public:
    using Grads = std::vector<Tensor<T>>;
    // Fills out[i] for inputs whose need flag is set; others stay undefined.
    using VjpFn = std::function<void(const Tensor<T>& upstream, const std::vector<char>& need, Grads& out)>;

    explicit Tape(TapeMode mode = TapeMode::first_order) : mode_(mode) {}
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    TapeMode mode() const { return mode_; }
    bool recording() const { return recording_; }
    std::size_t size() const { return nodes_.size(); }

    // Registers a parameter or input as a differentiable leaf.
    Tensor<T> leaf(const Tensor<T>& value) {
        if (value.on_tape()) throw ShapeError("leaf: tensor already bound to a tape");
        Tensor<T> out = value;
        out.tape_ = this;
        out.node_ = static_cast<int>(nodes_.size());
        nodes_.push_back(Node{});
        return out;
    }

    Tensor<T> record(Shape shape, std::vector<T> values, std::vector<int> inputs) {
        Tensor<T> out(std::move(shape), std::move(values));
        out.tape_ = this;
        out.node_ = static_cast<int>(nodes_.size());
        nodes_.push_back(Node{std::move(inputs), VjpFn{}});
        return out;
    }

    void set_vjp(int node, VjpFn fn) { nodes_[static_cast<std::size_t>(node)].vjp = std::move(fn); }

    std::vector<Tensor<T>> gradients(const Tensor<T>& loss, const std::vector<Tensor<T>>& wrt) {
        return gradients(loss, wrt, mode_ == TapeMode::higher_order);
    }

    // Reverse-mode accumulation from a scalar loss. With record_backward the
    // produced gradients are tape nodes reachable from the original leaves.
    std::vector<Tensor<T>> gradients(const Tensor<T>& loss, const std::vector<Tensor<T>>& wrt,
                                     bool record_backward) {
        if (loss.tape() != this || loss.node() < 0)
            throw ShapeError("gradients: loss is detached from this tape");
        if (loss.size() != 1)
            throw ShapeError("gradients: loss must be scalar, got " + shape_str(loss.shape()));
        if (record_backward && mode_ != TapeMode::higher_order)
            throw ShapeError("gradients: recording the backward pass requires higher_order mode");

        const std::size_t top = static_cast<std::size_t>(loss.node());

        // Nodes that can still influence a requested gradient target.
        std::vector<char> wanted(top + 1, 0);
        for (const auto& w : wrt)
            if (w.tape() == this && w.node() >= 0 && static_cast<std::size_t>(w.node()) <= top)
                wanted[static_cast<std::size_t>(w.node())] = 1;
        std::vector<char> reaches(top + 1, 0);
        for (std::size_t id = 0; id <= top; ++id) {
            if (wanted[id]) { reaches[id] = 1; continue; }
            for (int in : nodes_[id].inputs)
                if (in >= 0 && reaches[static_cast<std::size_t>(in)]) { reaches[id] = 1; break; }
        }

        // Nodes reachable backwards from the loss.
        std::vector<char> live(top + 1, 0);
        std::vector<std::size_t> stack{top};
        live[top] = 1;
        while (!stack.empty()) {
            std::size_t id = stack.back();
            stack.pop_back();
            for (int in : nodes_[id].inputs) {
                if (in < 0) continue;
                auto uin = static_cast<std::size_t>(in);
                if (!live[uin]) { live[uin] = 1; stack.push_back(uin); }
            }
        }

        std::vector<Tensor<T>> adjoint(top + 1);
        adjoint[top] = Tensor<T>::full(loss.shape(), T(1));

        const bool saved = recording_;
        recording_ = record_backward;
        try {
            std::vector<char> need;
            Grads grads;
            for (std::size_t id = top + 1; id-- > 0;) {
                if (!live[id] || !reaches[id] || !adjoint[id].defined()) continue;
                // Copy: vjp execution may reallocate nodes_.
                const std::vector<int> inputs = nodes_[id].inputs;
                const VjpFn vjp = nodes_[id].vjp;
                if (!vjp) continue;
                need.assign(inputs.size(), 0);
                bool any = false;
                for (std::size_t i = 0; i < inputs.size(); ++i) {
                    if (inputs[i] >= 0 && reaches[static_cast<std::size_t>(inputs[i])]) {
                        need[i] = 1;
                        any = true;
                    }
                }
                if (!any) continue;
                grads.assign(inputs.size(), Tensor<T>{});
                vjp(adjoint[id], need, grads);
                for (std::size_t i = 0; i < inputs.size(); ++i) {
                    if (!need[i] || !grads[i].defined()) continue;
                    auto in = static_cast<std::size_t>(inputs[i]);
                    adjoint[in] = adjoint[in].defined() ? add(adjoint[in], grads[i]) : grads[i];
                }
                if (id != top) adjoint[id] = Tensor<T>{};
            }
        } catch (...) {
            recording_ = saved;
            throw;
        }
        recording_ = saved;

        std::vector<Tensor<T>> out;
        out.reserve(wrt.size());
        for (const auto& w : wrt) {
            if (w.tape() == this && w.node() >= 0 && static_cast<std::size_t>(w.node()) <= top &&
                adjoint[static_cast<std::size_t>(w.node())].defined())
                out.push_back(adjoint[static_cast<std::size_t>(w.node())]);
            else
                out.push_back(Tensor<T>::zeros(w.shape()));
        }
        return out;
    }

private:
    struct Node {
        std::vector<int> inputs;
        VjpFn vjp;
    };

    std::vector<Node> nodes_;
    TapeMode mode_;
    bool recording_ = true;
};

// ---------------------------------------------------------------------------
// Primitive operations. Every op computes eagerly, validates finiteness, and
// registers a vjp built from these same primitives, which is what makes
// second-order differentiation (double backprop) work.
// ---------------------------------------------------------------------------

namespace detail {

template <class T>
Tape<T>* common_tape(std::initializer_list<const Tensor<T>*> ts) {
    Tape<T>* tape = nullptr;
    for (const Tensor<T>* t : ts) {
        if (!t->on_tape()) continue;
        if (tape && tape != t->tape())
            throw ShapeError("op: operands bound to different tapes");
        tape = t->tape();
    }
    return tape;
}

template <class T>
void check_finite(const std::vector<T>& v, const char* op) {
    for (const T& x : v)
        if (!std::isfinite(static_cast<double>(x)))
            throw NumericError(std::string(op) + ": non-finite output");
}

// Creates the result; records it (with the vjp produced by `builder`, which
// receives the finished output tensor) only when a tape is live.
template <class T, class Builder>
Tensor<T> finish(const char* op, Tape<T>* tape, Shape shape, std::vector<T> values,
                 std::vector<int> inputs, Builder&& builder) {
    check_finite(values, op);
    if (!tape || !tape->recording())
        return Tensor<T>(std::move(shape), std::move(values));
    Tensor<T> out = tape->record(std::move(shape), std::move(values), std::move(inputs));
    tape->set_vjp(out.node(), builder(out));
    return out;
}

template <class T>
void require_same_shape(const char* op, const Tensor<T>& a, const Tensor<T>& b) {
    if (a.shape() != b.shape())
        throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
}

} // namespace detail

template <class T> Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <class T> Tensor<T> scale(const Tensor<T>& x, T c);
template <class T> Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);
template <class T> Tensor<T> div(const Tensor<T>& a, const Tensor<T>& b);
template <class T> Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);
template <class T> Tensor<T> transpose(const Tensor<T>& x);
template <class T> Tensor<T> reshape(const Tensor<T>& x, Shape shape);
template <class T> Tensor<T> broadcast_to(const Tensor<T>& x, const Shape& shape);
template <class T> Tensor<T> sum_keepdim(const Tensor<T>& x, std::size_t axis);
template <class T> Tensor<T> concat(const Tensor<T>& a, const Tensor<T>& b, std::size_t axis);
template <class T> Tensor<T> slice(const Tensor<T>& x, std::size_t axis, std::size_t start, std::size_t len);
template <class T> Tensor<T> gather_rows(const Tensor<T>& x, std::shared_ptr<const std::vector<std::size_t>> idx);
template <class T> Tensor<T> scatter_rows(const Tensor<T>& x, std::shared_ptr<const std::vector<std::size_t>> idx, std::size_t out_rows);

template <class T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
    detail::require_same_shape("add", a, b);
    std::vector<T> v(a.size());
    const T* pa = a.data();
    const T* pb = b.data();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = pa[i] + pb[i];
    return detail::finish("add", detail::common_tape<T>({&a, &b}), a.shape(), std::move(v),
                          {a.node(), b.node()}, [](const Tensor<T>&) {
                              return [](const Tensor<T>& up, const std::vector<char>& need,
                                        typename Tape<T>::Grads& out) {
                                  if (need[0]) out[0] = up;
                                  if (need[1]) out[1] = up;
                              };
                          });
}

template <class T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
    detail::require_same_shape("sub", a, b);
    std::vector<T> v(a.size());
    const T* pa = a.data();
    const T* pb = b.data();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = pa[i] - pb[i];
    return detail::finish("sub", detail::common_tape<T>({&a, &b}), a.shape(), std::move(v),
                          {a.node(), b.node()}, [](const Tensor<T>&) {
                              return [](const Tensor<T>& up, const std::vector<char>& need,
                                        typename Tape<T>::Grads& out) {
                                  if (need[0]) out[0] = up;
                                  if (need[1]) out[1] = scale(up, T(-1));
                              };
                          });
}

template <class T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
    detail::require_same_shape("mul", a, b);
    std::vector<T> v(a.size());
    const T* pa = a.data();
    const T* pb = b.data();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = pa[i] * pb[i];
    return detail::finish("mul", detail::common_tape<T>({&a, &b}), a.shape(), std::move(v),
                          {a.node(), b.node()}, [a, b](const Tensor<T>&) {
                              return [a, b](const Tensor<T>& up, const std::vector<char>& need,
                                            typename Tape<T>::Grads& out) {
                                  if (need[0]) out[0] = mul(up, b);
                                  if (need[1]) out[1] = mul(up, a);
                              };
                          });
}

template <class T>
Tensor<T> div(const Tensor<T>& a, const Tensor<T>& b) {
    detail::require_same_shape("div", a, b);
    std::vector<T> v(a.size());
    const T* pa = a.data();
    const T* pb = b.data();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = pa[i] / pb[i];
    return detail::finish("div", detail::common_tape<T>({&a, &b}), a.shape(), std::move(v),
                          {a.node(), b.node()}, [a, b](const Tensor<T>& out_t) {
                              return [a, b, out_t](const Tensor<T>& up, const std::vector<char>& need,
                                                   typename Tape<T>::Grads& out) {
                                  if (need[0]) out[0] = div(up, b);
                                  if (need[1]) out[1] = scale(div(mul(up, out_t), b), T(-1));
                              };
                          });
}

template <class T>
Tensor<T> scale(const Tensor<T>& x, T c) {
    std::vector<T> v(x.size());
    const T* p = x.data();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = p[i] * c;
    return detail::finish("scale", detail::common_tape<T>({&x}), x.shape(), std::move(v),
                          {x.node()}, [c](const Tensor<T>&) {
                              return [c](const Tensor<T>& up, const std::vector<char>& need,
                                         typename Tape<T>::Grads& out) {
                                  if (need[0]) out[0] = scale(up, c);
                              };
                          });
}

template <class T>
Tensor<T> neg(const Tensor<T>& x) { return scale(x, T(-1)); }

template <class T>
Tensor<T> add_const(const Tensor<T>& x, T c) {
    std::vector<T> v(x.size());
    const T* p = x.data();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = p[i] + c;
    return detail::finish("add_const", detail::common_tape<T>({&x}), x.shape(), std::move(v),
                          {x.node()}, [](const Tensor<T>&) {
                              return [](const Tensor<T>& up, const std::vector<char>& need,
                                        typename Tape<T>::Grads& out) {
                                  if (need[0]) out[0] = up;
                              };
                          });
}

template <class T>
Tensor<T> exp(const Tensor<T>& x) {
    std::vector<T> v(x.size());
    const T* p = x.data();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(p[i]);
    return detail::finish("exp", detail::common_tape<T>({&x}), x.shape(), std::move(v),
                          {x.node()}, [](const Tensor<T>& out_t) {
                              return [out_t](const Tensor<T>& up, const std::vector<char>& need,
                                             typename Tape<T>::Grads& out) {
                                  if (need[0]) out[0] = mul(up, out_t);
                              };
                          });
}

template <class T>
Tensor<T> log(const Tensor<T>& x) {
    std::vector<T> v(x.size());
    const T* p = x.data();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::log(p[i]);
    return detail::finish("log", detail::common_tape<T>({&x}), x.shape(), std::move(v),
                          {x.node()}, [x](const Tensor<T>&) {
                              return [x](const Tensor<T>& up, const std::vector<char>& need,
                                         typename Tape<T>::Grads& out) {
                                  if (need[0]) out[0] = div(up, x);
                              };
                          });
}

template <class T>
Tensor<T> sqrt(const Tensor<T>& x) {
    std::vector<T> v(x.size());
    const T* p = x.data();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sqrt(p[i]);
    return detail::finish("sqrt", detail::common_tape<T>({&x}), x.shape(), std::move(v),
                          {x.node()}, [](const Tensor<T>& out_t) {
                              return [out_t](const Tensor<T>& up, const std::vector<char>& need,
                                             typename Tape<T>::Grads& out) {
                                  if (need[0]) out[0] = scale(div(up, out_t), T(0.5));
                              };
                          });
}

template <class T>
Tensor<T> square(const Tensor<T>& x) {
    std::vector<T> v(x.size());
    const T* p = x.data();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = p[i] * p[i];
    return detail::finish("square", detail::common_tape<T>({&x}), x.shape(), std::move(v),
                          {x.node()}, [x](const Tensor<T>&) {
                              return [x](const Tensor<T>& up, const std::vector<char>& need,
                                         typename Tape<T>::Grads& out) {
                                  if (need[0]) out[0] = scale(mul(up, x), T(2));
                              };
                          });
}

template <class T>
Tensor<T> abs(const Tensor<T>& x) {
    std::vector<T> v(x.size());
    std::vector<T> sign(x.size());
    const T* p = x.data();
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = std::abs(p[i]);
        sign[i] = p[i] > T(0) ? T(1) : (p[i] < T(0) ? T(-1) : T(0));
    }
    Tensor<T> sign_t(x.shape(), std::move(sign));
    return detail::finish("abs", detail::common_tape<T>({&x}), x.shape(), std::move(v),
                          {x.node()}, [sign_t](const Tensor<T>&) {
                              return [sign_t](const Tensor<T>& up, const std::vector<char>& need,
                                              typename Tape<T>::Grads& out) {
                                  if (need[0]) out[0] = mul(up, sign_t);
                              };
                          });
}

// Subgradient at 0 is 0.
template <class T>
Tensor<T> relu(const Tensor<T>& x) {
    std::vector<T> v(x.size());
    std::vector<T> mask(x.size());
    const T* p = x.data();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const bool pos = p[i] > T(0);
        v[i] = pos ? p[i] : T(0);
        mask[i] = pos ? T(1) : T(0);
    }
    Tensor<T> mask_t(x.shape(), std::move(mask));
    return detail::finish("relu", detail::common_tape<T>({&x}), x.shape(), std::move(v),
                          {x.node()}, [mask_t](const Tensor<T>&) {
                              return [mask_t](const Tensor<T>& up, const std::vector<char>& need,
                                              typename Tape<T>::Grads& out) {
                                  if (need[0]) out[0] = mul(up, mask_t);
                              };
                          });
}

template <class T>
Tensor<T> tanh(const Tensor<T>& x) {
    std::vector<T> v(x.size());
    const T* p = x.data();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::tanh(p[i]);
    return detail::finish("tanh", detail::common_tape<T>({&x}), x.shape(), std::move(v),
                          {x.node()}, [](const Tensor<T>& out_t) {
                              return [out_t](const Tensor<T>& up, const std::vector<char>& need,
                                             typename Tape<T>::Grads& out) {
                                  if (need[0])
                                      out[0] = mul(up, add_const(neg(square(out_t)), T(1)));
                              };
                          });
}

template <class T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.extent(1) != b.extent(0))
        throw ShapeError("matmul: incompatible shapes " + shape_str(a.shape()) + " x " +
                         shape_str(b.shape()));
    const std::size_t m = a.extent(0), k = a.extent(1), n = b.extent(1);
    std::vector<T> v(m * n, T(0));
    const T* pa = a.data();
    const T* pb = b.data();
    T* pc = v.data();
    auto rows = [&](std::size_t i0, std::size_t i1) {
        for (std::size_t i = i0; i < i1; ++i) {
            const T* arow = pa + i * k;
            T* crow = pc + i * n;
            for (std::size_t kk = 0; kk < k; ++kk) {
                const T av = arow[kk];
                const T* brow = pb + kk * n;
                for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
            }
        }
    };
    if (2 * m * k * n >= (std::size_t{1} << 16))
        parallel_for(m, rows);
    else
        rows(0, m);
    return detail::finish("matmul", detail::common_tape<T>({&a, &b}), Shape{m, n}, std::move(v),
                          {a.node(), b.node()}, [a, b](const Tensor<T>&) {
                              return [a, b](const Tensor<T>& up, const std::vector<char>& need,
                                            typename Tape<T>::Grads& out) {
                                  if (need[0]) out[0] = matmul(up, transpose(b));
                                  if (need[1]) out[1] = matmul(transpose(a), up);
                              };
                          });
}

template <class T>
Tensor<T> transpose(const Tensor<T>& x) {
    if (x.rank() != 2) throw ShapeError("transpose: rank-2 tensor required");
    const std::size_t m = x.extent(0), n = x.extent(1);
    std::vector<T> v(m * n);
    const T* p = x.data();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) v[j * m + i] = p[i * n + j];
    return detail::finish("transpose", detail::common_tape<T>({&x}), Shape{n, m}, std::move(v),
                          {x.node()}, [](const Tensor<T>&) {
                              return [](const Tensor<T>& up, const std::vector<char>& need,
                                        typename Tape<T>::Grads& out) {
                                  if (need[0]) out[0] = transpose(up);
                              };
                          });
}

template <class T>
Tensor<T> reshape(const Tensor<T>& x, Shape shape) {
    if (shape_numel(shape) != x.size())
        throw ShapeError("reshape: cannot view " + shape_str(x.shape()) + " as " + shape_str(shape));
    Shape orig = x.shape();
    return detail::finish("reshape", detail::common_tape<T>({&x}), std::move(shape),
                          std::vector<T>(x.values()), {x.node()}, [orig](const Tensor<T>&) {
                              return [orig](const Tensor<T>& up, const std::vector<char>& need,
                                            typename Tape<T>::Grads& out) {
                                  if (need[0]) out[0] = reshape(up, orig);
                              };
                          });
}

template <class T>
Tensor<T> broadcast_to(const Tensor<T>& x, const Shape& shape) {
    if (x.rank() != shape.size())
        throw ShapeError("broadcast_to: rank mismatch");
    for (std::size_t i = 0; i < shape.size(); ++i)
        if (x.extent(i) != shape[i] && x.extent(i) != 1)
            throw ShapeError("broadcast_to: cannot expand " + shape_str(x.shape()) + " to " +
                             shape_str(shape));
    const std::size_t r = shape.size();
    std::vector<std::size_t> xstride(r, 0);
    {
        std::size_t s = 1;
        for (std::size_t i = r; i-- > 0;) {
            xstride[i] = (x.extent(i) == 1 && shape[i] != 1) ? 0 : s;
            s *= x.extent(i);
        }
    }
    const std::size_t n = shape_numel(shape);
    std::vector<T> v(n);
    std::vector<std::size_t> idx(r, 0);
    const T* p = x.data();
    std::size_t src = 0;
    for (std::size_t flat = 0; flat < n; ++flat) {
        v[flat] = p[src];
        for (std::size_t i = r; i-- > 0;) {
            if (++idx[i] < shape[i]) {
                src += xstride[i];
                break;
            }
            src -= xstride[i] * (shape[i] - 1);
            idx[i] = 0;
        }
    }
    Shape orig = x.shape();
    return detail::finish("broadcast_to", detail::common_tape<T>({&x}), shape, std::move(v),
                          {x.node()}, [orig](const Tensor<T>&) {
                              return [orig](const Tensor<T>& up, const std::vector<char>& need,
                                            typename Tape<T>::Grads& out) {
                                  if (!need[0]) return;
                                  Tensor<T> g = up;
                                  for (std::size_t i = 0; i < orig.size(); ++i)
                                      if (orig[i] == 1 && g.extent(i) != 1) g = sum_keepdim(g, i);
                                  out[0] = g;
                              };
                          });
}

template <class T>
Tensor<T> sum_keepdim(const Tensor<T>& x, std::size_t axis) {
    if (axis >= x.rank()) throw ShapeError("sum_keepdim: axis out of range");
    Shape oshape = x.shape();
    const std::size_t mid = oshape[axis];
    oshape[axis] = 1;
    std::size_t outer = 1, inner = 1;
    for (std::size_t i = 0; i < axis; ++i) outer *= x.extent(i);
    for (std::size_t i = axis + 1; i < x.rank(); ++i) inner *= x.extent(i);
    std::vector<T> v(outer * inner, T(0));
    const T* p = x.data();
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t m = 0; m < mid; ++m) {
            const T* row = p + (o * mid + m) * inner;
            T* orow = v.data() + o * inner;
            for (std::size_t i = 0; i < inner; ++i) orow[i] += row[i];
        }
    Shape xshape = x.shape();
    return detail::finish("sum_keepdim", detail::common_tape<T>({&x}), std::move(oshape),
                          std::move(v), {x.node()}, [xshape](const Tensor<T>&) {
                              return [xshape](const Tensor<T>& up, const std::vector<char>& need,
                                              typename Tape<T>::Grads& out) {
                                  if (need[0]) out[0] = broadcast_to(up, xshape);
                              };
                          });
}

template <class T>
Tensor<T> sum_all(const Tensor<T>& x) {
    T acc = T(0);
    for (const T& v : x.values()) acc += v;
    Shape xshape = x.shape();
    return detail::finish("sum_all", detail::common_tape<T>({&x}), Shape{1},
                          std::vector<T>{acc}, {x.node()}, [xshape](const Tensor<T>&) {
                              return [xshape](const Tensor<T>& up, const std::vector<char>& need,
                                              typename Tape<T>::Grads& out) {
                                  if (!need[0]) return;
                                  out[0] = broadcast_to(reshape(up, Shape(xshape.size(), 1)), xshape);
                              };
                          });
}

template <class T>
Tensor<T> concat(const Tensor<T>& a, const Tensor<T>& b, std::size_t axis) {
    if (a.rank() != b.rank()) throw ShapeError("concat: rank mismatch");
    if (axis >= a.rank()) throw ShapeError("concat: axis out of range");
    for (std::size_t i = 0; i < a.rank(); ++i)
        if (i != axis && a.extent(i) != b.extent(i))
            throw ShapeError("concat: extents disagree off the concat axis: " +
                             shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    Shape oshape = a.shape();
    oshape[axis] += b.extent(axis);
    std::size_t outer = 1, inner = 1;
    for (std::size_t i = 0; i < axis; ++i) outer *= a.extent(i);
    for (std::size_t i = axis + 1; i < a.rank(); ++i) inner *= a.extent(i);
    const std::size_t wa = a.extent(axis) * inner, wb = b.extent(axis) * inner;
    std::vector<T> v(shape_numel(oshape));
    const T* pa = a.data();
    const T* pb = b.data();
    for (std::size_t o = 0; o < outer; ++o) {
        std::memcpy(v.data() + o * (wa + wb), pa + o * wa, wa * sizeof(T));
        std::memcpy(v.data() + o * (wa + wb) + wa, pb + o * wb, wb * sizeof(T));
    }
    const std::size_t ea = a.extent(axis), eb = b.extent(axis);
    return detail::finish("concat", detail::common_tape<T>({&a, &b}), std::move(oshape),
                          std::move(v), {a.node(), b.node()}, [axis, ea, eb](const Tensor<T>&) {
                              return [axis, ea, eb](const Tensor<T>& up, const std::vector<char>& need,
                                                    typename Tape<T>::Grads& out) {
                                  if (need[0]) out[0] = slice(up, axis, 0, ea);
                                  if (need[1]) out[1] = slice(up, axis, ea, eb);
                              };
                          });
}

template <class T>
Tensor<T> slice(const Tensor<T>& x, std::size_t axis, std::size_t start, std::size_t len) {
    if (axis >= x.rank()) throw ShapeError("slice: axis out of range");
    if (start + len > x.extent(axis)) throw ShapeError("slice: range out of bounds");
    Shape oshape = x.shape();
    oshape[axis] = len;
    std::size_t outer = 1, inner = 1;
    for (std::size_t i = 0; i < axis; ++i) outer *= x.extent(i);
    for (std::size_t i = axis + 1; i < x.rank(); ++i) inner *= x.extent(i);
    std::vector<T> v(shape_numel(oshape));
    const std::size_t wx = x.extent(axis) * inner, wo = len * inner;
    const T* p = x.data();
    for (std::size_t o = 0; o < outer; ++o)
        std::memcpy(v.data() + o * wo, p + o * wx + start * inner, wo * sizeof(T));
    Shape xshape = x.shape();
    return detail::finish("slice", detail::common_tape<T>({&x}), std::move(oshape), std::move(v),
                          {x.node()}, [axis, start, len, xshape](const Tensor<T>&) {
                              return [axis, start, len, xshape](const Tensor<T>& up,
                                                                const std::vector<char>& need,
                                                                typename Tape<T>::Grads& out) {
                                  if (!need[0]) return;
                                  Tensor<T> g = up;
                                  if (start > 0) {
                                      Shape s = xshape;
                                      s[axis] = start;
                                      g = concat(Tensor<T>::zeros(s), g, axis);
                                  }
                                  const std::size_t after = xshape[axis] - start - len;
                                  if (after > 0) {
                                      Shape s = xshape;
                                      s[axis] = after;
                                      g = concat(g, Tensor<T>::zeros(s), axis);
                                  }
                                  out[0] = g;
                              };
                          });
}

// Row selection along axis 0 with a fixed index list; the adjoint is the
// accumulating scatter, and vice versa, so both stay differentiable to any
// order (they are linear maps transposed to each other).
template <class T>
Tensor<T> gather_rows(const Tensor<T>& x, std::shared_ptr<const std::vector<std::size_t>> idx) {
    if (x.rank() < 1) throw ShapeError("gather_rows: rank >= 1 required");
    const std::size_t rows = x.extent(0), rowlen = x.size() / (rows ? rows : 1);
    for (std::size_t i : *idx)
        if (i >= rows) throw ShapeError("gather_rows: index out of range");
    Shape oshape = x.shape();
    oshape[0] = idx->size();
    std::vector<T> v(idx->size() * rowlen);
    const T* p = x.data();
    for (std::size_t i = 0; i < idx->size(); ++i)
        std::memcpy(v.data() + i * rowlen, p + (*idx)[i] * rowlen, rowlen * sizeof(T));
    return detail::finish("gather_rows", detail::common_tape<T>({&x}), std::move(oshape),
                          std::move(v), {x.node()}, [idx, rows](const Tensor<T>&) {
                              return [idx, rows](const Tensor<T>& up, const std::vector<char>& need,
                                                 typename Tape<T>::Grads& out) {
                                  if (need[0]) out[0] = scatter_rows(up, idx, rows);
                              };
                          });
}

template <class T>
Tensor<T> scatter_rows(const Tensor<T>& x, std::shared_ptr<const std::vector<std::size_t>> idx,
                       std::size_t out_rows) {
    if (x.rank() < 1) throw ShapeError("scatter_rows: rank >= 1 required");
    if (idx->size() != x.extent(0)) throw ShapeError("scatter_rows: index count != rows");
    const std::size_t rowlen = x.size() / (x.extent(0) ? x.extent(0) : 1);
    for (std::size_t i : *idx)
        if (i >= out_rows) throw ShapeError("scatter_rows: index out of range");
    Shape oshape = x.shape();
    oshape[0] = out_rows;
    std::vector<T> v(out_rows * rowlen, T(0));
    const T* p = x.data();
    for (std::size_t i = 0; i < idx->size(); ++i) {
        T* orow = v.data() + (*idx)[i] * rowlen;
        const T* row = p + i * rowlen;
        for (std::size_t j = 0; j < rowlen; ++j) orow[j] += row[j];
    }
    return detail::finish("scatter_rows", detail::common_tape<T>({&x}), std::move(oshape),
                          std::move(v), {x.node()}, [idx](const Tensor<T>&) {
                              return [idx](const Tensor<T>& up, const std::vector<char>& need,
                                           typename Tape<T>::Grads& out) {
                                  if (need[0]) out[0] = gather_rows(up, idx);
                              };
                          });
}

// ---------------------------------------------------------------------------
// Small composites used everywhere. Built from primitives only, so they are
// differentiable to any order for free.
// ---------------------------------------------------------------------------

template <class T>
Tensor<T> mean_all(const Tensor<T>& x) {
    return scale(sum_all(x), T(1) / static_cast<T>(x.size()));
}

template <class T>
Tensor<T> mean_keepdim(const Tensor<T>& x, std::size_t axis) {
    return scale(sum_keepdim(x, axis), T(1) / static_cast<T>(x.extent(axis)));
}

// L2 norm over the given axis (kept); eps guards the sqrt at zero.
template <class T>
Tensor<T> l2_norm_keepdim(const Tensor<T>& x, std::size_t axis, T eps = T(0)) {
    return sqrt(add_const(sum_keepdim(square(x), axis), eps));
}

template <class T>
Tensor<T> l2_norm_all(const Tensor<T>& x, T eps = T(0)) {
    return sqrt(add_const(sum_all(square(x)), eps));
}

} // namespace cipherlab
