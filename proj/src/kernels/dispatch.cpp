// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The sounder authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "sounder/kernels.hpp"

#include <atomic>

namespace sounder::kernels {
namespace {

bool probe_avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

std::atomic<const Ops*> g_active{nullptr};

const Ops* resolve_automatic() {
#if defined(__x86_64__) || defined(_M_X64)
    if (probe_avx2()) return &avx2_ops;
#endif
    return &scalar_ops;
}

} // namespace

bool avx2_available() { return probe_avx2(); }

const Ops& ops() {
    const Ops* p = g_active.load(std::memory_order_acquire);
    if (!p) {
        p = resolve_automatic();
        g_active.store(p, std::memory_order_release);
    }
    return *p;
}

void set_backend(Backend b) {
    switch (b) {
    case Backend::Scalar:
        g_active.store(&scalar_ops, std::memory_order_release);
        break;
    case Backend::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
        if (probe_avx2()) {
            g_active.store(&avx2_ops, std::memory_order_release);
            break;
        }
#endif
        g_active.store(&scalar_ops, std::memory_order_release);
        break;
    case Backend::Automatic:
        g_active.store(resolve_automatic(), std::memory_order_release);
        break;
    }
}

const char* backend_name() {
#if defined(__x86_64__) || defined(_M_X64)
    if (&ops() == &avx2_ops) return "avx2";
#endif
    return "scalar";
}

} // namespace sounder::kernels
