#include "core/generator.hpp"

#include <cmath>
#include <cstddef>
#include <utility>

#include "core/error.hpp"

namespace penh {

ResBlock::ResBlock(const std::string& name, int channels, bool residual_)
    : conv1(name + "/conv1", channels, channels, 3, 1, 1),
      conv2(name + "/conv2", channels, channels, 3, 1, 1),
      act(name + "/prelu", channels),
      residual(residual_) {}

Tensor ResBlock::forward(const Tensor& x, Cache* cache) const {
  Tensor a = conv1.forward(x);
  Tensor p = act.forward(a);
  Tensor y = conv2.forward(p);
  if (residual) {
    for (std::size_t i = 0; i < y.size(); ++i) y.data[i] += x.data[i];
  }
  if (cache) {
    cache->a = std::move(a);
    cache->p = std::move(p);
  }
  return y;
}

Tensor ResBlock::backward(const Tensor& x, const Cache& cache, const Tensor& dy,
                          bool want_wgrad) {
  Tensor dp = conv2.backward(cache.p, dy, want_wgrad);
  Tensor da = act.backward(cache.a, dp, want_wgrad);
  Tensor dx = conv1.backward(x, da, want_wgrad);
  if (residual) {
    for (std::size_t i = 0; i < dx.size(); ++i) dx.data[i] += dy.data[i];
  }
  return dx;
}

void ResBlock::collect(std::vector<Parameter*>& out) {
  conv1.collect(out);
  act.collect(out);
  conv2.collect(out);
}

void ResBlock::init(Rng& rng) {
  conv1.init_he(rng);
  conv2.init_he(rng);
}

Gate::Gate(const std::string& name, int channels)
    : wa(name + "/wa", channels, channels, 1, 1, 0),
      wb(name + "/wb", channels, channels, 1, 1, 0) {}

Tensor Gate::forward(const Tensor& x, Cache* cache) const {
  Tensor a = wa.forward(x);
  Tensor b = wb.forward(x);
  Tensor y(a.n, a.c, a.h, a.w);
  for (std::size_t i = 0; i < y.size(); ++i) {
    double av = a.data[i];
    double la = av > 0.0 ? av : kSlope * av;
    double sb = 1.0 / (1.0 + std::exp(-b.data[i]));
    y.data[i] = la * sb;
  }
  if (cache) {
    cache->a = std::move(a);
    cache->b = std::move(b);
  }
  return y;
}

Tensor Gate::backward(const Tensor& x, const Cache& cache, const Tensor& dy,
                      bool want_wgrad) {
  Tensor da(dy.n, dy.c, dy.h, dy.w);
  Tensor db(dy.n, dy.c, dy.h, dy.w);
  for (std::size_t i = 0; i < dy.size(); ++i) {
    double av = cache.a.data[i];
    double la = av > 0.0 ? av : kSlope * av;
    double sb = 1.0 / (1.0 + std::exp(-cache.b.data[i]));
    da.data[i] = dy.data[i] * sb * (av > 0.0 ? 1.0 : kSlope);
    db.data[i] = dy.data[i] * la * sb * (1.0 - sb);
  }
  Tensor dx = wa.backward(x, da, want_wgrad);
  Tensor dxb = wb.backward(x, db, want_wgrad);
  for (std::size_t i = 0; i < dx.size(); ++i) dx.data[i] += dxb.data[i];
  return dx;
}

void Gate::collect(std::vector<Parameter*>& out) {
  wa.collect(out);
  wb.collect(out);
}

void Gate::init(Rng& rng) {
  wa.init_he(rng);
  wb.init_he(rng);
}

namespace {

int level_channels(const std::vector<int>& s, std::size_t i) {
  return s[i < s.size() ? i : s.size() - 1];
}

std::vector<int> checked_schedule(const GeneratorConfig& cfg) {
  if (cfg.schedule.empty()) fail(ErrorCode::ConfigError, "generator schedule is empty");
  for (int c : cfg.schedule)
    if (c < 1) fail(ErrorCode::ConfigError, "generator schedule has non-positive width");
  return cfg.schedule;
}

}  // namespace

// Wiring table for the default schedule {64, 96, 128, 196} (conv params =
// Cout*Cin*k*k + Cout; PReLU adds C; transpose convs mirror the downs):
//
//   in_conv   3->64 3x3                         1,792
//   enc0 rb   64  (2 convs + PReLU)            73,920   down 64->96    55,392
//   enc1 rb   96                              166,176   down 96->128  110,720
//   enc2 rb   128                             295,296   down 128->196 225,988
//   enc3 rb   196                             692,076   down 196->196 345,940
//   dec3 up   196->196 345,940   gate 77,224   rb 196   692,076
//   dec2 up   196->128 225,920   gate 33,024   rb 128   295,296
//   dec1 up   128->96  110,688   gate 18,624   rb 96    166,176
//   dec0 up   96->64    55,360   gate  8,320   rb 64     73,920
//   out_conv  64->3 3x3                          1,731
//                                       total 4,071,599
Generator::Generator(const GeneratorConfig& cfg, uint64_t init_seed)
    : cfg_(cfg),
      in_conv_("g/in_conv", 3, checked_schedule(cfg)[0], 3, 1, 1),
      out_conv_("g/out_conv", cfg.schedule[0], 3, 3, 1, 1) {
  const std::vector<int>& s = cfg_.schedule;
  const std::size_t levels = s.size();
  for (std::size_t i = 0; i < levels; ++i) {
    std::string idx = std::to_string(i);
    int ch = s[i];
    int deeper = level_channels(s, i + 1);
    enc_blocks_.emplace_back("g/enc" + idx + "/rb", ch, cfg_.use_residual_blocks);
    downs_.emplace_back("g/enc" + idx + "/down", ch, deeper, 3, 2, 1);
    ups_.emplace_back("g/dec" + idx + "/up", deeper, ch, 3, 2, 1, 1);
    if (cfg_.use_gates) gates_.emplace_back("g/dec" + idx + "/gate", ch);
    dec_blocks_.emplace_back("g/dec" + idx + "/rb", ch, cfg_.use_residual_blocks);
  }

  Rng rng(init_seed);
  in_conv_.init_he(rng);
  for (std::size_t i = 0; i < levels; ++i) {
    enc_blocks_[i].init(rng);
    downs_[i].init_he(rng);
  }
  for (std::size_t i = levels; i-- > 0;) {
    ups_[i].init_he(rng);
    if (cfg_.use_gates) gates_[i].init(rng);
    dec_blocks_[i].init(rng);
  }
  out_conv_.init_he(rng);
}

Tensor Generator::forward(const Tensor& x, Cache* cache) const {
  if (x.c != 3)
    fail(ErrorCode::ShapeError, "generator expects 3 input channels, got " + x.shape_str());
  const int div = divisor();
  if (x.h < div || x.w < div || x.h % div != 0 || x.w % div != 0)
    fail(ErrorCode::ShapeError, "generator input " + std::to_string(x.h) + "x" +
                                    std::to_string(x.w) + " must be a multiple of " +
                                    std::to_string(div));

  const std::size_t levels = cfg_.schedule.size();
  if (cache) {
    cache->input = x;
    cache->enc_rb.resize(levels);
    cache->enc_rb_out.resize(levels);
    cache->down_out.resize(levels);
    cache->up_out.resize(levels);
    cache->gate_cache.resize(cfg_.use_gates ? levels : 0);
    cache->fused.resize(levels);
    cache->dec_rb.resize(levels);
    cache->dec_rb_out.resize(levels);
  }

  Tensor cur = in_conv_.forward(x);
  if (cache) cache->in_conv_out = cur;

  std::vector<Tensor> skips(levels);
  for (std::size_t i = 0; i < levels; ++i) {
    Tensor rb = enc_blocks_[i].forward(cur, cache ? &cache->enc_rb[i] : nullptr);
    cur = downs_[i].forward(rb);
    if (cache) {
      cache->enc_rb_out[i] = rb;
      cache->down_out[i] = cur;
    }
    skips[i] = std::move(rb);
  }

  for (std::size_t i = levels; i-- > 0;) {
    Tensor up = ups_[i].forward(cur);
    Tensor fuse = cfg_.use_gates
                      ? gates_[i].forward(skips[i], cache ? &cache->gate_cache[i] : nullptr)
                      : std::move(skips[i]);
    for (std::size_t j = 0; j < fuse.size(); ++j) fuse.data[j] += up.data[j];
    if (cache) {
      cache->up_out[i] = up;
      cache->fused[i] = fuse;
    }
    cur = dec_blocks_[i].forward(fuse, cache ? &cache->dec_rb[i] : nullptr);
    if (cache) cache->dec_rb_out[i] = cur;
  }

  Tensor pre = out_conv_.forward(cur);
  Tensor y = tanh01(pre);
  if (cache) cache->pre_tanh = std::move(pre);
  return y;
}

Tensor Generator::backward(const Cache& cache, const Tensor& dy, bool want_wgrad) {
  const std::size_t levels = cfg_.schedule.size();
  Tensor dpre = tanh01_backward(cache.pre_tanh, dy);
  Tensor dcur = out_conv_.backward(cache.dec_rb_out[0], dpre, want_wgrad);

  std::vector<Tensor> dskip(levels);
  for (std::size_t i = 0; i < levels; ++i) {
    Tensor dfuse = dec_blocks_[i].backward(cache.fused[i], cache.dec_rb[i], dcur, want_wgrad);
    dskip[i] = cfg_.use_gates
                   ? gates_[i].backward(cache.enc_rb_out[i], cache.gate_cache[i], dfuse,
                                        want_wgrad)
                   : dfuse;
    const Tensor& up_in = i + 1 < levels ? cache.dec_rb_out[i + 1] : cache.down_out[levels - 1];
    dcur = ups_[i].backward(up_in, dfuse, want_wgrad);
  }

  for (std::size_t i = levels; i-- > 0;) {
    Tensor drb = downs_[i].backward(cache.enc_rb_out[i], dcur, want_wgrad);
    for (std::size_t j = 0; j < drb.size(); ++j) drb.data[j] += dskip[i].data[j];
    const Tensor& rb_in = i > 0 ? cache.down_out[i - 1] : cache.in_conv_out;
    dcur = enc_blocks_[i].backward(rb_in, cache.enc_rb[i], drb, want_wgrad);
  }

  return in_conv_.backward(cache.input, dcur, want_wgrad);
}

std::vector<Parameter*> Generator::parameters() {
  std::vector<Parameter*> out;
  in_conv_.collect(out);
  for (std::size_t i = 0; i < enc_blocks_.size(); ++i) {
    enc_blocks_[i].collect(out);
    downs_[i].collect(out);
  }
  for (std::size_t i = dec_blocks_.size(); i-- > 0;) {
    ups_[i].collect(out);
    if (cfg_.use_gates) gates_[i].collect(out);
    dec_blocks_[i].collect(out);
  }
  out_conv_.collect(out);
  return out;
}

std::size_t Generator::param_count() const {
  std::size_t total = in_conv_.param_count() + out_conv_.param_count();
  for (const auto& b : enc_blocks_)
    total += b.conv1.param_count() + b.conv2.param_count() + b.act.param_count();
  for (const auto& c : downs_) total += c.param_count();
  for (const auto& c : ups_) total += c.param_count();
  for (const auto& g : gates_) total += g.wa.param_count() + g.wb.param_count();
  for (const auto& b : dec_blocks_)
    total += b.conv1.param_count() + b.conv2.param_count() + b.act.param_count();
  return total;
}

}  // namespace penh
