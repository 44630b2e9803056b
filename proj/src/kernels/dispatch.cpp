#include <atomic>

#include "ellattr/kernels/kernels.hpp"

namespace ellattr::kernels {

extern const batch_ops scalar_ops;
#if defined(__x86_64__) || defined(_M_X64)
extern const batch_ops avx2_ops;
#endif

packed_poly packed_poly::pack(const hom_poly& p) {
    packed_poly out;
    out.degree = p.degree();
    for (const auto& t : p.terms()) {
        out.cre.push_back(t.coeff.real());
        out.cim.push_back(t.coeff.imag());
        out.ei.push_back(t.exps[0]);
        out.ej.push_back(t.exps[1]);
        out.ek.push_back(t.exps[2]);
    }
    return out;
}

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const batch_ops* auto_select() {
#if defined(__x86_64__) || defined(_M_X64)
    if (cpu_has_avx2()) return &avx2_ops;
#endif
    return &scalar_ops;
}

std::atomic<const batch_ops*> forced{nullptr};

}  // namespace

const batch_ops& active() {
    static const batch_ops* auto_sel = auto_select();
    const batch_ops* f = forced.load(std::memory_order_relaxed);
    return f ? *f : *auto_sel;
}

std::vector<const batch_ops*> available() {
    std::vector<const batch_ops*> out{&scalar_ops};
#if defined(__x86_64__) || defined(_M_X64)
    if (cpu_has_avx2()) out.push_back(&avx2_ops);
#endif
    return out;
}

bool force(std::string_view name) {
    if (name.empty()) {
        forced.store(nullptr, std::memory_order_relaxed);
        return true;
    }
    for (const batch_ops* b : available()) {
        if (name == b->name) {
            forced.store(b, std::memory_order_relaxed);
            return true;
        }
    }
    return false;
}

}  // namespace ellattr::kernels
