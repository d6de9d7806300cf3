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

#include "abisim/engine.hpp"

#include <string>

#include "abisim/errors.hpp"

namespace abisim {

Engine::Engine(EngineConfig cfg, LatencyModel lat)
    : cfg_(std::move(cfg)), lat_(lat), pr_(cfg_.regs), ops_(cfg_.banks) {
    pr_.validate();
    mems_.reserve(kNumLevels);
    for (std::size_t i = 0; i < kNumLevels; ++i) {
        const auto level = static_cast<MemLevel>(i);
        mems_.emplace_back(level, cfg_.banks, cfg_.capacity(level));
    }
    rearm_monitor();
}

void Engine::set_lwsm_frac_bits(int frac_bits) {
    if (frac_bits < 1 || frac_bits > 14) throw RangeError("frac_bits must be in [1,14]");
    frac_bits_ = frac_bits;
}

void Engine::rearm_monitor() { monitor_ = SparsityMonitor::armed(pr_.sp_window, pr_.sp_act); }

void Engine::prset(std::string_view field, std::int64_t value) {
    pr_ = set_prog_reg(pr_, field, value);
    if (field == "sp_act" || field == "sp_window") rearm_monitor();
    OpRecord rec;
    rec.kind = OpKind::ProgSet;
    log_.record_op(rec);
}

void Engine::preload(MemLevel level, std::size_t bank, std::size_t addr, Word w) {
    mem(level).write(bank, addr, w, setup_log_);
    OpRecord rec;
    rec.kind = OpKind::Preload;
    rec.level = level;
    setup_log_.record_op(rec);
}

void Engine::preload_row(MemLevel level, std::size_t addr, std::span<const Word> row) {
    if (row.size() > cfg_.banks) throw AddressError("row wider than the bank count");
    for (std::size_t b = 0; b < cfg_.banks; ++b) {
        preload(level, b, addr, b < row.size() ? row[b] : Word::make(0));
    }
}

void Engine::load_reg(std::size_t bank, Word w) {
    if (bank >= cfg_.banks) throw AddressError("REG bank " + std::to_string(bank) + " out of range");
    ops_.reg[bank] = w;
    log_.add(EventClass::Write);
    OpRecord rec;
    rec.kind = OpKind::LoadReg;
    rec.banks = 1;
    log_.record_op(rec);
}

void Engine::load_reg_vector(std::span<const Word> values) {
    if (values.size() > cfg_.banks) throw AddressError("REG vector wider than the bank count");
    for (std::size_t b = 0; b < cfg_.banks; ++b) ops_.reg[b] = b < values.size() ? values[b] : Word::make(0);
    log_.add(EventClass::Write, cfg_.banks);
    OpRecord rec;
    rec.kind = OpKind::LoadReg;
    rec.banks = static_cast<std::uint16_t>(cfg_.banks);
    log_.record_op(rec);
}

void Engine::load_reg2(Word w) {
    ops_.reg2 = w;
    log_.add(EventClass::Write);
    OpRecord rec;
    rec.kind = OpKind::LoadReg2;
    log_.record_op(rec);
}

namespace {

OpRecord fused_record(OpKind kind, const ProgRegs& pr, std::size_t banks, const FusedOptions& opt) {
    OpRecord rec;
    rec.kind = kind;
    rec.level = pr.nrf_m;
    rec.bit_mode = pr.bit_mode;
    rec.elem_mode = pr.elem_mode;
    rec.bit_wid = static_cast<std::uint8_t>(pr.bit_wid);
    rec.banks = static_cast<std::uint16_t>(banks);
    rec.scaler = !opt.partial && pr.enabled(Stage::S);
    rec.th = opt.partial ? ThMode::Bypass : pr.th_mode();
    rec.partial = opt.partial;
    rec.chained = opt.chained;
    rec.with_bias = opt.with_bias;
    return rec;
}

/// Registers seen by one op once its instruction-level TH override is applied.
ProgRegs effective_regs(const ProgRegs& pr, const FusedOptions& opt) {
    if (!opt.th_override) return pr;
    ProgRegs eff = pr;
    eff.th_act = false;
    eff.sm_act = false;
    eff.dis_stage.erase(Stage::TH);
    switch (*opt.th_override) {
        case ThMode::Bypass: eff.dis_stage.insert(Stage::TH); break;
        case ThMode::Relu: eff.th_act = true; break;
        case ThMode::Compare: break;
        case ThMode::Softmax: eff.sm_act = true; break;
    }
    return eff;
}

}  // namespace

const RceResult& Engine::vmacrt(std::size_t addr, FusedOptions opt) {
    if (opt.chained) {
        if (!acc_) throw ConfigError("chained op without a prior accumulator value");
        opt.acc_in = *acc_;
    }
    const ProgRegs eff = effective_regs(pr_, opt);
    auto res = execute_fused(mem(pr_.nrf_m), addr, ops_, eff, monitor_, log_, opt, lat_);
    if (pr_.sp_act && !monitor_.detector_on) pr_.sp_act = false;  // auto-shutdown clears SP_ACT
    log_.record_op(fused_record(OpKind::Fused, eff, cfg_.banks, opt));
    acc_ = res.raw_sum;
    if (!opt.partial && eff.th_mode() == ThMode::Softmax) sm_buffer_.push_back(res.scaled);
    last_ = std::move(res);
    return *last_;
}

const RceResult& Engine::vred(std::size_t addr, FusedOptions opt) {
    if (opt.chained) {
        if (!acc_) throw ConfigError("chained op without a prior accumulator value");
        opt.acc_in = *acc_;
    }
    const ProgRegs eff = effective_regs(pr_, opt);
    auto res = execute_reduce(mem(pr_.nrf_m), addr, ops_, eff, log_, opt, lat_);
    log_.record_op(fused_record(OpKind::Reduce, eff, cfg_.banks, opt));
    acc_ = res.raw_sum;
    if (!opt.partial && eff.th_mode() == ThMode::Softmax) sm_buffer_.push_back(res.scaled);
    last_ = std::move(res);
    return *last_;
}

std::int64_t Engine::stout(std::optional<StoreTarget> target) {
    if (!last_) throw ConfigError("STOUT before any compute op");
    const auto value = last_->th_out;
    if (target) {
        if (!Word::representable(value, Word::kMaxWidth)) {
            throw RangeError("result " + std::to_string(value) + " does not fit a 16-bit word");
        }
        mem(target->level).write(target->bank, target->addr, Word::make(static_cast<std::int32_t>(value)), log_);
    } else {
        log_.add(EventClass::Write);  // output-stream register write
    }
    outputs_.push_back(value);
    OpRecord rec;
    rec.kind = OpKind::Store;
    rec.level = target ? target->level : pr_.nrf_m;
    log_.record_op(rec);
    return value;
}

const LwsmResult& Engine::stout_lwsm() {
    if (sm_buffer_.empty()) throw EmptyValueError("softmax buffer is empty");
    const auto raw = normalize_scores(sm_buffer_, frac_bits_);
    auto res = lwsm(std::span<const std::uint32_t>(raw));
    for (int shift : res.shifts) outputs_.push_back(prob_fixed(shift, frac_bits_));
    // Normalisation costs one subtract per element on top of LWSM itself.
    log_.add(EventClass::LwsmOp, res.event_count() + raw.size());
    OpRecord rec;
    rec.kind = OpKind::LwsmFlush;
    rec.elements = static_cast<std::uint32_t>(raw.size());
    log_.record_op(rec);
    sm_buffer_.clear();
    last_lwsm_ = std::move(res);
    return *last_lwsm_;
}

void Engine::clear_outputs() noexcept {
    outputs_.clear();
    sm_buffer_.clear();
    acc_.reset();
}

void Engine::reset_log() noexcept { log_.clear(); }

nlohmann::json Engine::snapshot() const {
    nlohmann::json reg = nlohmann::json::array();
    for (const auto& w : ops_.reg) reg.push_back(w.value());
    return nlohmann::json{{"regs", to_json(pr_)},
                          {"reg", reg},
                          {"reg2", ops_.reg2 ? nlohmann::json(ops_.reg2->value()) : nlohmann::json(nullptr)},
                          {"accumulator", acc_ ? nlohmann::json(*acc_) : nlohmann::json(nullptr)},
                          {"outputs", outputs_},
                          {"monitor", to_json(monitor_)},
                          {"instructions", log_.ops().size()}};
}

}  // namespace abisim
