// data/checkpoint.cc

// Copyright 2026  Front-End Adapter Toolkit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "fea/data/checkpoint.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fea/core/error.h"
#include "fea/data/run_config.h"

namespace fea {

namespace detail {
long long g_checkpoint_fault_after_bytes = -1;
}  // namespace detail

namespace {

constexpr char kMagic[8] = {'F', 'E', 'A', 'C', 'K', 'P', 'T', '1'};
constexpr uint32_t kVersion = 1;

uint64_t fnv1a(const char* data, size_t n, uint64_t h = 1469598103934665603ull) {
  for (size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 1099511628211ull;
  }
  return h;
}

// ---- buffer writers/readers ----

void put_bytes(std::string& buf, const void* p, size_t n) {
  buf.append(reinterpret_cast<const char*>(p), n);
}
template <typename T>
void put(std::string& buf, T v) {
  put_bytes(buf, &v, sizeof(T));
}
void put_str(std::string& buf, const std::string& s) {
  put<uint32_t>(buf, static_cast<uint32_t>(s.size()));
  buf.append(s);
}
void put_mat(std::string& buf, const Mat& m) {
  put<uint32_t>(buf, static_cast<uint32_t>(m.rows()));
  put<uint32_t>(buf, static_cast<uint32_t>(m.cols()));
  put_bytes(buf, m.data(), m.size() * sizeof(double));
}

struct Reader {
  const std::string& buf;
  size_t pos = 0;

  void need(size_t n) const {
    FEA_CHECK_T(pos + n <= buf.size(), CheckpointError,
                "checkpoint truncated (need " << n << " bytes at offset "
                                              << pos << ", have "
                                              << buf.size() - pos << ")");
  }
  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, buf.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
  }
  std::string get_str() {
    const uint32_t n = get<uint32_t>();
    need(n);
    std::string s(buf.data() + pos, n);
    pos += n;
    return s;
  }
  Mat get_mat() {
    const uint32_t rows = get<uint32_t>();
    const uint32_t cols = get<uint32_t>();
    Mat m(static_cast<int>(rows), static_cast<int>(cols));
    need(m.size() * sizeof(double));
    std::memcpy(m.data(), buf.data() + pos, m.size() * sizeof(double));
    pos += m.size() * sizeof(double);
    return m;
  }
};

nlohmann::json meta_to_json(const CheckpointMeta& meta) {
  RunConfig cfg_holder;  // reuse the model JSON codec through RunConfig
  cfg_holder.model = meta.model_config;
  nlohmann::json model_j =
      nlohmann::json::parse(cfg_holder.to_json_string()).at("model");
  return {{"model", model_j},
          {"train",
           {{"update", meta.train.update},
            {"n_w", meta.train.n_w},
            {"phase", meta.train.phase},
            {"seed", meta.train.seed}}},
          {"provenance",
           {{"cmdline", meta.cmdline},
            {"config_hash", meta.config_hash},
            {"parent_hash", meta.parent_hash}}}};
}

CheckpointMeta meta_from_json(const nlohmann::json& j) {
  CheckpointMeta meta;
  // wrap the stored model object in a RunConfig document to reuse the codec
  nlohmann::json wrapper = {{"model", j.at("model")}};
  meta.model_config = RunConfig::from_json_string(wrapper.dump()).model;
  const auto& t = j.at("train");
  meta.train.update = t.at("update").get<long long>();
  meta.train.n_w = t.at("n_w").get<long long>();
  meta.train.phase = t.at("phase").get<std::string>();
  meta.train.seed = t.at("seed").get<uint64_t>();
  const auto& p = j.at("provenance");
  meta.cmdline = p.at("cmdline").get<std::string>();
  meta.config_hash = p.at("config_hash").get<uint64_t>();
  meta.parent_hash = p.at("parent_hash").get<uint64_t>();
  return meta;
}

}  // namespace

void save_checkpoint(const std::string& path, const EncoderModel& model,
                     const AdamW* optimizer, const CheckpointMeta& meta,
                     const KMeansModel* kmeans) {
  std::string buf;
  buf.reserve(1 << 20);
  put_bytes(buf, kMagic, sizeof(kMagic));
  put<uint32_t>(buf, kVersion);
  put_str(buf, meta_to_json(meta).dump());

  const auto& names = EncoderModel::group_names();
  put<uint32_t>(buf, static_cast<uint32_t>(names.size()));
  for (const auto& gname : names) {
    const auto& params = model.group(gname);
    put_str(buf, gname);
    put<uint32_t>(buf, static_cast<uint32_t>(params.size()));
    for (const Param* p : params) {
      put_str(buf, p->name);
      put_mat(buf, p->value);
    }
  }

  if (optimizer != nullptr) {
    put<uint32_t>(buf, static_cast<uint32_t>(optimizer->state().size()));
    for (const auto& [name, st] : optimizer->state()) {
      put_str(buf, name);
      put<int64_t>(buf, st.t);
      put_mat(buf, st.m);
      put_mat(buf, st.v);
    }
  } else {
    put<uint32_t>(buf, 0);
  }

  if (kmeans != nullptr && kmeans->k() > 0) {
    put_mat(buf, kmeans->centroids);
  } else {
    put<uint32_t>(buf, 0);
    put<uint32_t>(buf, 0);
  }

  put<uint64_t>(buf, fnv1a(buf.data(), buf.size()));

  // atomic write: temp file in the same directory, then rename
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    FEA_CHECK_T(os.good(), CheckpointError,
                "cannot open '" << tmp.string() << "' for write");
    if (detail::g_checkpoint_fault_after_bytes >= 0) {
      const size_t n = std::min<size_t>(
          buf.size(),
          static_cast<size_t>(detail::g_checkpoint_fault_after_bytes));
      os.write(buf.data(), static_cast<std::streamsize>(n));
      os.flush();
      throw CheckpointError("simulated crash during checkpoint write");
    }
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    FEA_CHECK_T(os.good(), CheckpointError,
                "failed writing '" << tmp.string() << "'");
  }
  fs::rename(tmp, target);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  FEA_CHECK_T(is.good(), CheckpointError,
              "cannot open checkpoint '" << path << "'");
  std::stringstream ss;
  ss << is.rdbuf();
  const std::string buf = ss.str();

  FEA_CHECK_T(buf.size() >= sizeof(kMagic) + sizeof(uint32_t) + sizeof(uint64_t),
              CheckpointError, "'" << path << "': file too small");
  FEA_CHECK_T(std::memcmp(buf.data(), kMagic, sizeof(kMagic)) == 0,
              CheckpointError, "'" << path << "': not a checkpoint file");
  uint64_t stored_hash = 0;
  std::memcpy(&stored_hash, buf.data() + buf.size() - sizeof(uint64_t),
              sizeof(uint64_t));
  const uint64_t computed_hash =
      fnv1a(buf.data(), buf.size() - sizeof(uint64_t));
  FEA_CHECK_T(stored_hash == computed_hash, CheckpointError,
              "'" << path << "': integrity hash mismatch (truncated or "
                  << "corrupt file)");

  Reader r{buf, sizeof(kMagic)};
  const uint32_t version = r.get<uint32_t>();
  FEA_CHECK_T(version == kVersion, CheckpointError,
              "'" << path << "': unsupported checkpoint version " << version
                  << " (expected " << kVersion << ")");

  LoadedCheckpoint out;
  const std::string meta_json = r.get_str();
  try {
    out.meta = meta_from_json(nlohmann::json::parse(meta_json));
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("bad checkpoint metadata: ") + e.what());
  }

  out.model = std::make_unique<EncoderModel>(out.meta.model_config, 0);

  const uint32_t n_groups = r.get<uint32_t>();
  for (uint32_t g = 0; g < n_groups; ++g) {
    const std::string gname = r.get_str();
    auto& params = out.model->group(gname);
    const uint32_t n_params = r.get<uint32_t>();
    FEA_CHECK_T(n_params == params.size(), CheckpointError,
                "'" << path << "': group '" << gname << "' holds " << n_params
                    << " tensors, model expects " << params.size());
    for (uint32_t i = 0; i < n_params; ++i) {
      const std::string pname = r.get_str();
      Mat value = r.get_mat();
      FEA_CHECK_T(pname == params[i]->name, CheckpointError,
                  "'" << path << "': parameter name mismatch: stored '"
                      << pname << "', model expects '" << params[i]->name
                      << "'");
      FEA_CHECK_T(value.same_shape(params[i]->value), CheckpointError,
                  "'" << path << "': shape mismatch for '" << pname
                      << "': stored " << value.rows() << "x" << value.cols()
                      << ", model expects " << params[i]->value.rows() << "x"
                      << params[i]->value.cols());
      params[i]->value = std::move(value);
    }
  }

  const uint32_t n_opt = r.get<uint32_t>();
  for (uint32_t i = 0; i < n_opt; ++i) {
    const std::string name = r.get_str();
    AdamW::ParamState st;
    st.t = r.get<int64_t>();
    st.m = r.get_mat();
    st.v = r.get_mat();
    out.optimizer_state.emplace(name, std::move(st));
  }

  out.kmeans.centroids = r.get_mat();
  return out;
}

uint64_t checkpoint_file_hash(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  FEA_CHECK_T(is.good(), CheckpointError,
              "cannot open '" << path << "' for hashing");
  uint64_t h = 1469598103934665603ull;
  char chunk[65536];
  while (is.read(chunk, sizeof(chunk)) || is.gcount() > 0) {
    h = fnv1a(chunk, static_cast<size_t>(is.gcount()), h);
    if (is.eof()) break;
  }
  return h;
}

}  // namespace fea
