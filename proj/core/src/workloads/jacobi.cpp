/*
 * Copyright 2026 The abisim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "abisim/workloads/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "abisim/errors.hpp"

namespace abisim::workloads {

namespace {

std::size_t tiles_for(std::size_t n, std::size_t banks) { return (n + banks - 1) / banks; }

}  // namespace

void LinearSystem::validate() const {
    const auto n = b.size();
    if (a.rows != n || a.cols != n || x0.size() != n) throw SchemaError("linear system dimensions differ");
    for (std::size_t i = 0; i < n; ++i) {
        std::int64_t off = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) off += std::llabs(a.at(i, j));
        }
        if (std::llabs(a.at(i, i)) <= off) throw SchemaError("system is not strictly diagonally dominant");
    }
}

JacobiParams jacobi_params(const WorkloadSpec& spec) {
    JacobiParams p;
    ParamReader dims(spec.dims, "dims");
    p.n = static_cast<std::size_t>(dims.get_int("n", 8, 1, 256));
    dims.finish();
    ParamReader sched(spec.schedule, "schedule");
    p.iterations = static_cast<std::size_t>(sched.get_int("iterations", 12, 1, 10000));
    sched.finish();
    return p;
}

LinearSystem random_system(std::size_t n, int bit_wid, double sparsity, Rng& rng) {
    if (bit_wid < 2) throw RangeError("Jacobi needs bit_wid >= 2");
    // a_ii must fit the 16-bit REG'' word: 2 (n-1) a_max + 1 + slack <= 32767.
    const std::int64_t a_max = std::max<std::int64_t>(
        1, std::min<std::int64_t>(max_magnitude(bit_wid), 32000 / static_cast<std::int64_t>(2 * std::max<std::size_t>(n, 2))));
    const std::int64_t x_max = std::int64_t{1} << (bit_wid - 2);
    LinearSystem sys;
    sys.a = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        std::int64_t off = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            sys.a.at(i, j) = sparse_value(rng, a_max, sparsity);
            off += std::llabs(sys.a.at(i, j));
        }
        const auto diag = 2 * off + 1 + rng.uniform_int(0, a_max);
        sys.a.at(i, i) = rng.bernoulli(0.5) ? diag : -diag;
    }
    sys.x_true.resize(n);
    for (auto& v : sys.x_true) v = rng.uniform_int(-x_max, x_max);
    sys.b.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) sys.b[i] += sys.a.at(i, j) * sys.x_true[j];
    }
    sys.x0.assign(n, 0);
    return sys;
}

std::vector<std::int64_t> jacobi_step_oracle(const LinearSystem& sys, const std::vector<std::int64_t>& x) {
    const auto n = sys.size();
    std::vector<std::int64_t> next(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::int64_t acc = sys.b[i];
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) acc -= sys.a.at(i, j) * x[j];
        }
        next[i] = acc / sys.a.at(i, i);
    }
    return next;
}

std::vector<double> jacobi_float_solution(const LinearSystem& sys, std::size_t max_iter) {
    const auto n = sys.size();
    std::vector<double> x(sys.x0.begin(), sys.x0.end());
    std::vector<double> next(n);
    for (std::size_t k = 0; k < max_iter; ++k) {
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double acc = static_cast<double>(sys.b[i]);
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) acc -= static_cast<double>(sys.a.at(i, j)) * x[j];
            }
            next[i] = acc / static_cast<double>(sys.a.at(i, i));
            delta = std::max(delta, std::fabs(next[i] - x[i]));
        }
        x.swap(next);
        if (delta < 1e-12) break;
    }
    return x;
}

std::size_t jacobi_rows(std::size_t n, std::size_t banks) { return n * tiles_for(n, banks); }

void jacobi_load(Engine& engine, const LinearSystem& sys) {
    sys.validate();
    const auto n = sys.size();
    const auto banks = engine.banks();
    const auto tiles = tiles_for(n, banks);
    const auto level = engine.regs().nrf_m;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::int64_t> row(sys.a.row(i).begin(), sys.a.row(i).end());
        row[i] = 0;
        for (std::size_t t = 0; t < tiles; ++t) engine.preload_row(level, i * tiles + t, to_words(tile(row, t * banks, banks)));
    }
    if (!engine.regs().enabled(Stage::S)) engine.prset("dis_s", 0);
    if (!engine.regs().dis_stage.contains(Stage::TH)) engine.prset("dis_th", 1);
}

std::vector<std::int64_t> jacobi_step(Engine& engine, const LinearSystem& sys, const std::vector<std::int64_t>& x) {
    const auto n = sys.size();
    const auto banks = engine.banks();
    const auto tiles = tiles_for(n, banks);
    std::vector<std::int64_t> next(n);
    std::vector<std::vector<Word>> x_tiles;
    for (std::size_t t = 0; t < tiles; ++t) x_tiles.push_back(to_words(tile(x, t * banks, banks)));
    std::optional<std::size_t> loaded;
    for (std::size_t i = 0; i < n; ++i) {
        engine.load_reg2(Word::make(static_cast<std::int32_t>(sys.a.at(i, i))));
        for (std::size_t t = 0; t < tiles; ++t) {
            if (loaded != t) {
                engine.load_reg_vector(x_tiles[t]);
                loaded = t;
            }
            FusedOptions opt;
            opt.subtract = true;
            opt.partial = t + 1 < tiles;
            if (t == 0) {
                opt.acc_in = sys.b[i];
                opt.with_bias = true;
            } else {
                opt.chained = true;
            }
            engine.vmacrt(i * tiles + t, opt);
        }
        next[i] = engine.stout();
    }
    return next;
}

JacobiRun jacobi_solve(Engine& engine, const LinearSystem& sys, std::size_t iterations) {
    JacobiRun run;
    run.x = sys.x0;
    for (std::size_t k = 0; k < iterations; ++k) {
        const auto expect = jacobi_step_oracle(sys, run.x);
        auto next = jacobi_step(engine, sys, run.x);
        if (next != expect) run.steps_match = false;
        run.iterations = k + 1;
        const bool same = next == run.x;
        run.x = std::move(next);
        if (same) {
            run.converged = true;
            break;
        }
    }
    const auto ref = jacobi_float_solution(sys);
    for (std::size_t i = 0; i < sys.size(); ++i) {
        run.max_error = std::max(run.max_error, std::fabs(static_cast<double>(run.x[i]) - ref[i]));
    }
    return run;
}

WorkloadOutcome run_jacobi(const WorkloadSpec& spec) {
    const auto params = jacobi_params(spec);
    WorkloadOutcome out;
    out.workload = "lp";
    out.seed = spec.seed;
    out.instances = spec.instances;
    Rng rng(spec.seed);
    auto engine = make_engine(spec.mode, spec.bit_wid, jacobi_rows(params.n, spec.mode.banks));
    nlohmann::json runs = nlohmann::json::array();
    for (std::size_t inst = 0; inst < spec.instances; ++inst) {
        const auto sys = random_system(params.n, spec.bit_wid, spec.sparsity, rng);
        jacobi_load(engine, sys);
        const auto run = jacobi_solve(engine, sys, params.iterations);
        const bool ok = run.steps_match && run.max_error <= 2.0;
        out.oracle_match = out.oracle_match && ok;
        runs.push_back({{"n", params.n},
                        {"iterations", run.iterations},
                        {"converged", run.converged},
                        {"steps_match", run.steps_match},
                        {"max_error", run.max_error},
                        {"x", run.x},
                        {"x_true", sys.x_true}});
    }
    out.detail = {{"runs", runs}, {"error_bound", 2.0}};
    out.log = engine.log();
    out.final_regs = engine.regs();
    return out;
}

}  // namespace abisim::workloads
