#include <atomic>
#include <cstdlib>
#include <string>

#include "nlheat/error.hpp"
#include "nlheat/simd.hpp"

namespace nlheat::simd {

namespace {

const KernelTable* table_for(Isa isa) {
    switch (isa) {
    case Isa::Scalar: return &scalar_kernels();
    case Isa::Avx2: return avx2_kernels();
    case Isa::Neon: return neon_kernels();
    }
    return nullptr;
}

const KernelTable* initial_choice() {
    if (const char* env = std::getenv("NLHEAT_ISA")) {
        const std::string_view want(env);
        for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
            if (want == isa_name(isa)) {
                if (const auto* t = table_for(isa)) {
                    return t;
                }
            }
        }
    }
    const auto all = available();
    return all.back();
}

std::atomic<const KernelTable*>& current() {
    static std::atomic<const KernelTable*> table{initial_choice()};
    return table;
}

} // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
    }
    return "scalar";
}

std::vector<const KernelTable*> available() {
    std::vector<const KernelTable*> out{&scalar_kernels()};
    if (const auto* t = neon_kernels()) {
        out.push_back(t);
    }
    if (const auto* t = avx2_kernels()) {
        out.push_back(t);
    }
    return out;
}

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

void select(Isa isa) {
    const auto* t = table_for(isa);
    if (t == nullptr) {
        throw ContractError("SIMD variant '" + std::string(isa_name(isa)) +
                            "' is not available on this machine");
    }
    current().store(t, std::memory_order_relaxed);
}

} // namespace nlheat::simd
