#include "geodepth/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "geodepth/error.hpp"

namespace geodepth::io {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_with_context(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::ParseError, source + ":" + std::to_string(line) + ":" +
                                           std::to_string(col) + ": " + e.what());
  }
}

// Accumulates schema violations with a JSON-pointer-like location prefix.
class Checker {
 public:
  void fail(const std::string& where, const std::string& what) {
    violations_.push_back(where + ": " + what);
  }
  bool ok() const { return violations_.empty(); }
  void throw_if_failed() {
    if (!violations_.empty()) throw SchemaError(std::move(violations_));
  }

  const json* field(const json& obj, const std::string& key, const std::string& where,
                    bool required = true) {
    if (!obj.is_object()) {
      fail(where, "expected an object");
      return nullptr;
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) fail(where + "." + key, "missing");
      return nullptr;
    }
    return &*it;
  }

  std::optional<double> number(const json& obj, const std::string& key,
                               const std::string& where, bool required = true) {
    const json* v = field(obj, key, where, required);
    if (v == nullptr) return std::nullopt;
    if (!v->is_number()) {
      fail(where + "." + key, "expected a number");
      return std::nullopt;
    }
    const double d = v->get<double>();
    if (!std::isfinite(d)) {
      fail(where + "." + key, "must be finite");
      return std::nullopt;
    }
    return d;
  }

  std::optional<std::int64_t> integer(const json& obj, const std::string& key,
                                      const std::string& where, bool required = true) {
    const json* v = field(obj, key, where, required);
    if (v == nullptr) return std::nullopt;
    if (!v->is_number_integer()) {
      fail(where + "." + key, "expected an integer");
      return std::nullopt;
    }
    return v->get<std::int64_t>();
  }

  std::optional<std::vector<std::array<double, 3>>> triples(
      const json& obj, const std::string& key, const std::string& where, int expected,
      bool required = true) {
    const json* v = field(obj, key, where, required);
    if (v == nullptr) return std::nullopt;
    const std::string at = where + "." + key;
    if (!v->is_array()) {
      fail(at, "expected an array");
      return std::nullopt;
    }
    if (static_cast<int>(v->size()) != expected) {
      fail(at, "expected " + std::to_string(expected) + " joints, got " +
                   std::to_string(v->size()));
      return std::nullopt;
    }
    std::vector<std::array<double, 3>> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const json& t = (*v)[i];
      if (!t.is_array() || t.size() != 3 || !t[0].is_number() || !t[1].is_number() ||
          !t[2].is_number()) {
        fail(at + "[" + std::to_string(i) + "]", "expected three numbers");
        return std::nullopt;
      }
      out.push_back({t[0].get<double>(), t[1].get<double>(), t[2].get<double>()});
    }
    return out;
  }

  std::optional<std::vector<bool>> flags(const json& obj, const std::string& key,
                                         const std::string& where, int expected) {
    const json* v = field(obj, key, where, false);
    if (v == nullptr) return std::nullopt;
    const std::string at = where + "." + key;
    if (!v->is_array() || static_cast<int>(v->size()) != expected) {
      fail(at, "expected " + std::to_string(expected) + " booleans");
      return std::nullopt;
    }
    std::vector<bool> out;
    for (const auto& b : *v) {
      if (!b.is_boolean()) {
        fail(at, "expected booleans");
        return std::nullopt;
      }
      out.push_back(b.get<bool>());
    }
    return out;
  }

 private:
  std::vector<std::string> violations_;
};

// Declared length units per meter; nullopt after recording a violation.
std::optional<double> length_scale(Checker& chk, const json& doc) {
  const json* units = chk.field(doc, "units", "$");
  if (units == nullptr) return std::nullopt;
  const json* length = chk.field(*units, "length", "$.units");
  const json* image = chk.field(*units, "image", "$.units");
  std::optional<double> scale;
  if (length != nullptr) {
    if (*length == "m") {
      scale = 1.0;
    } else if (*length == "mm") {
      scale = 1000.0;
    } else {
      chk.fail("$.units.length", "unsupported unit " + length->dump() + " (expected \"m\" or \"mm\")");
    }
  }
  if (image != nullptr && *image != "px") {
    chk.fail("$.units.image", "unsupported unit " + image->dump() + " (expected \"px\")");
  }
  return scale;
}

json skeleton_to_json(const SkeletonDef& skel) {
  json limbs = json::array();
  for (const Limb& l : skel.limbs()) limbs.push_back({l.parent, l.child});
  return {{"joint_names", skel.joint_names()},
          {"root", skel.root_index()},
          {"neck", skel.neck_index()},
          {"limbs", limbs}};
}

std::optional<SkeletonDef> skeleton_from_json(Checker& chk, const json& doc) {
  const json* s = chk.field(doc, "skeleton", "$");
  if (s == nullptr) return std::nullopt;
  const json* names = chk.field(*s, "joint_names", "$.skeleton");
  const auto root = chk.integer(*s, "root", "$.skeleton");
  const auto neck = chk.integer(*s, "neck", "$.skeleton");
  const json* limbs = chk.field(*s, "limbs", "$.skeleton");
  if (names == nullptr || !root || !neck || limbs == nullptr) return std::nullopt;
  std::vector<std::string> joint_names;
  if (!names->is_array()) {
    chk.fail("$.skeleton.joint_names", "expected an array of strings");
    return std::nullopt;
  }
  for (const auto& n : *names) {
    if (!n.is_string()) {
      chk.fail("$.skeleton.joint_names", "expected an array of strings");
      return std::nullopt;
    }
    joint_names.push_back(n.get<std::string>());
  }
  std::vector<Limb> limb_list;
  if (!limbs->is_array()) {
    chk.fail("$.skeleton.limbs", "expected an array of index pairs");
    return std::nullopt;
  }
  for (const auto& l : *limbs) {
    if (!l.is_array() || l.size() != 2 || !l[0].is_number_integer() ||
        !l[1].is_number_integer()) {
      chk.fail("$.skeleton.limbs", "expected an array of index pairs");
      return std::nullopt;
    }
    limb_list.push_back({l[0].get<int>(), l[1].get<int>()});
  }
  try {
    return SkeletonDef(std::move(joint_names), static_cast<int>(*root),
                       static_cast<int>(*neck), std::move(limb_list));
  } catch (const Error& e) {
    chk.fail("$.skeleton", e.what());
    return std::nullopt;
  }
}

std::optional<CameraIntrinsics> camera_from_json(Checker& chk, const json& doc) {
  const json* c = chk.field(doc, "camera", "$");
  if (c == nullptr) return std::nullopt;
  const auto fx = chk.number(*c, "fx", "$.camera");
  const auto fy = chk.number(*c, "fy", "$.camera");
  const auto cx = chk.number(*c, "cx", "$.camera");
  const auto cy = chk.number(*c, "cy", "$.camera");
  if (!fx || !fy || !cx || !cy) return std::nullopt;
  CameraIntrinsics cam{*fx, *fy, *cx, *cy};
  if (!(cam.fx > 0.0) || !(cam.fy > 0.0)) {
    chk.fail("$.camera", "focal lengths must be positive");
    return std::nullopt;
  }
  return cam;
}

void check_version(Checker& chk, const json& doc, const char* expected) {
  const json* v = chk.field(doc, "version", "$");
  if (v != nullptr && *v != expected) {
    chk.fail("$.version", "unrecognized version " + v->dump() + " (expected \"" +
                              expected + "\")");
  }
}

json units_block() { return {{"length", "m"}, {"image", "px"}}; }

}  // namespace

std::string canonical_dump(const json& doc) { return doc.dump(2) + "\n"; }

json scene_to_json(const SceneSample& scene) {
  json persons = json::array();
  const int jc = scene.skeleton.joint_count();
  for (const ScenePerson& p : scene.persons) {
    json joints = json::array();
    for (const Point3D& q : p.joints.joints) joints.push_back({q.x, q.y, q.z});
    std::vector<bool> occluded = p.occluded;
    occluded.resize(jc, false);
    persons.push_back({{"omega", p.omega},
                       {"joints_3d", joints},
                       {"valid", p.joints.valid},
                       {"occluded", occluded}});
  }
  return {{"version", kSceneVersion},
          {"units", units_block()},
          {"frame_id", scene.frame_id},
          {"rng_seed", scene.rng_seed},
          {"image", {{"width", scene.image_width}, {"height", scene.image_height}}},
          {"camera", {{"fx", scene.cam.fx}, {"fy", scene.cam.fy}, {"cx", scene.cam.cx},
                      {"cy", scene.cam.cy}}},
          {"skeleton", skeleton_to_json(scene.skeleton)},
          {"persons", persons}};
}

SceneSample scene_from_json(const json& doc) {
  Checker chk;
  if (!doc.is_object()) {
    chk.fail("$", "expected an object");
    chk.throw_if_failed();
  }
  check_version(chk, doc, kSceneVersion);
  const auto scale = length_scale(chk, doc);
  const auto cam = camera_from_json(chk, doc);
  const auto skel = skeleton_from_json(chk, doc);
  SceneSample scene;
  if (const auto f = chk.integer(doc, "frame_id", "$", false)) scene.frame_id = *f;
  if (const json* s = chk.field(doc, "rng_seed", "$", false)) {
    if (s->is_number_unsigned() || (s->is_number_integer() && s->get<std::int64_t>() >= 0)) {
      scene.rng_seed = s->get<std::uint64_t>();
    } else {
      chk.fail("$.rng_seed", "expected a non-negative integer");
    }
  }
  if (const json* img = chk.field(doc, "image", "$")) {
    const auto w = chk.integer(*img, "width", "$.image");
    const auto h = chk.integer(*img, "height", "$.image");
    if (w && h && (*w <= 0 || *h <= 0)) chk.fail("$.image", "dimensions must be positive");
    if (w) scene.image_width = static_cast<int>(*w);
    if (h) scene.image_height = static_cast<int>(*h);
  }
  const json* persons = chk.field(doc, "persons", "$");
  if (persons != nullptr && !persons->is_array()) {
    chk.fail("$.persons", "expected an array");
    persons = nullptr;
  }
  if (!skel || !scale || persons == nullptr) {
    chk.throw_if_failed();
  }
  const double per_m = scale.value_or(1.0);
  const int jc = skel ? skel->joint_count() : 0;
  const int root = skel ? skel->root_index() : 0;
  if (skel) scene.skeleton = *skel;
  if (cam) scene.cam = *cam;
  for (std::size_t i = 0; persons != nullptr && i < persons->size(); ++i) {
    const json& pj = (*persons)[i];
    const std::string where = "$.persons[" + std::to_string(i) + "]";
    ScenePerson person;
    person.joints = Pose3D::empty(jc);
    const auto omega = chk.number(pj, "omega", where);
    if (omega) {
      person.omega = *omega / per_m;
      if (!(person.omega > 0.0)) chk.fail(where + ".omega", "must be positive");
    }
    const bool has3d = pj.is_object() && pj.contains("joints_3d");
    if (has3d) {
      if (const auto j3 = chk.triples(pj, "joints_3d", where, jc)) {
        for (int k = 0; k < jc; ++k) {
          person.joints.joints[k] = {(*j3)[k][0] / per_m, (*j3)[k][1] / per_m, (*j3)[k][2] / per_m};
          person.joints.valid[k] = true;
        }
      }
    } else {
      const auto j25 = chk.triples(pj, "joints_25d", where, jc);
      const auto z_root = chk.number(pj, "z_root", where);
      if (j25 && z_root && cam) {
        for (int k = 0; k < jc; ++k) {
          const Point25D p{(*j25)[k][0], (*j25)[k][1], k == root ? 0.0 : (*j25)[k][2] / per_m};
          try {
            person.joints.joints[k] = back_project(p, *z_root / per_m, *cam);
            person.joints.valid[k] = true;
          } catch (const Error&) {
            chk.fail(where + ".joints_25d[" + std::to_string(k) + "]", "behind the camera");
          }
        }
      }
    }
    if (const auto valid = chk.flags(pj, "valid", where, jc)) {
      for (int k = 0; k < jc; ++k) person.joints.valid[k] = person.joints.valid[k] && (*valid)[k];
    }
    person.occluded.assign(jc, false);
    if (const auto occ = chk.flags(pj, "occluded", where, jc)) person.occluded = *occ;
    for (int k = 0; k < jc; ++k) {
      const auto& q = person.joints.joints[k];
      if (person.joints.valid[k] &&
          (!std::isfinite(q.x) || !std::isfinite(q.y) || !std::isfinite(q.z))) {
        chk.fail(where + ".joints_3d[" + std::to_string(k) + "]", "must be finite");
      }
    }
    scene.persons.push_back(std::move(person));
  }
  chk.throw_if_failed();
  return scene;
}

SceneSample read_scene(const std::filesystem::path& path) {
  return scene_from_json(parse_with_context(read_file(path), path.string()));
}

void write_scene(const std::filesystem::path& path, const SceneSample& scene) {
  write_text_file(path, canonical_dump(scene_to_json(scene)));
}

json predictions_to_json(const PredictionSet& set, const SkeletonDef& skel) {
  json persons = json::array();
  for (const PredictedPerson& p : set.persons) {
    json joints = json::array();
    for (const Point25D& q : p.pose.joints) joints.push_back({q.u, q.v, q.z_rel});
    json pj = {{"joints_25d", joints}, {"valid", p.pose.valid}};
    if (p.reg) pj["depth"] = {{"z", p.reg->z}, {"sigma", p.reg->sigma}};
    if (p.omega) pj["omega"] = *p.omega;
    persons.push_back(pj);
  }
  (void)skel;
  return {{"version", kPredictionVersion},
          {"units", units_block()},
          {"frame_id", set.frame_id},
          {"persons", persons}};
}

PredictionSet predictions_from_json(const json& doc, const SkeletonDef& skel) {
  Checker chk;
  check_version(chk, doc, kPredictionVersion);
  const auto scale = length_scale(chk, doc);
  const double per_m = scale.value_or(1.0);
  PredictionSet set;
  if (const auto f = chk.integer(doc, "frame_id", "$", false)) set.frame_id = *f;
  const json* persons = chk.field(doc, "persons", "$");
  if (persons != nullptr && !persons->is_array()) {
    chk.fail("$.persons", "expected an array");
    persons = nullptr;
  }
  const int jc = skel.joint_count();
  for (std::size_t i = 0; persons != nullptr && i < persons->size(); ++i) {
    const json& pj = (*persons)[i];
    const std::string where = "$.persons[" + std::to_string(i) + "]";
    PredictedPerson person;
    person.pose = Pose25D::empty(jc);
    if (const auto j25 = chk.triples(pj, "joints_25d", where, jc)) {
      for (int k = 0; k < jc; ++k) {
        person.pose.joints[k] = {(*j25)[k][0], (*j25)[k][1],
                                 k == skel.root_index() ? 0.0 : (*j25)[k][2] / per_m};
        person.pose.valid[k] = true;
        person.pose.score[k] = 1.0;
      }
    }
    if (const auto valid = chk.flags(pj, "valid", where, jc)) {
      for (int k = 0; k < jc; ++k) person.pose.valid[k] = person.pose.valid[k] && (*valid)[k];
    }
    if (const json* d = chk.field(pj, "depth", where, false)) {
      const auto z = chk.number(*d, "z", where + ".depth");
      const auto s = chk.number(*d, "sigma", where + ".depth");
      if (z && s) {
        if (!(*s > 0.0)) chk.fail(where + ".depth.sigma", "must be positive");
        person.reg = DepthEstimate{*z / per_m, *s / per_m, true};
      }
    }
    if (const auto om = chk.number(pj, "omega", where, false)) person.omega = *om / per_m;
    set.persons.push_back(std::move(person));
  }
  chk.throw_if_failed();
  return set;
}

PredictionSet read_predictions(const std::filesystem::path& path, const SkeletonDef& skel) {
  return predictions_from_json(parse_with_context(read_file(path), path.string()), skel);
}

void write_predictions(const std::filesystem::path& path, const PredictionSet& set,
                       const SkeletonDef& skel) {
  write_text_file(path, canonical_dump(predictions_to_json(set, skel)));
}

namespace {

constexpr char kMagic[4] = {'G', 'D', 'M', 'P'};
constexpr std::uint32_t kMapsVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32(const std::string& in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  }
  return v;
}

void put_floats(std::string& out, const std::vector<float>& data) {
  for (float f : data) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof bits);
    put_u32(out, bits);
  }
}

void get_floats(const std::string& in, std::size_t& at, std::vector<float>& data) {
  for (float& f : data) {
    const std::uint32_t bits = get_u32(in, at);
    std::memcpy(&f, &bits, sizeof f);
    at += 4;
  }
}

}  // namespace

std::string encode_maps(const DenseMaps& maps) {
  std::string out(kMagic, 4);
  put_u32(out, kMapsVersion);
  put_u32(out, static_cast<std::uint32_t>(maps.height()));
  put_u32(out, static_cast<std::uint32_t>(maps.width()));
  put_u32(out, static_cast<std::uint32_t>(maps.stride()));
  put_u32(out, static_cast<std::uint32_t>(maps.joint_count()));
  put_u32(out, static_cast<std::uint32_t>(maps.limb_count()));
  put_floats(out, maps.heatmap_data());
  put_floats(out, maps.paf_data());
  put_floats(out, maps.offset_data());
  return out;
}

DenseMaps decode_maps(const std::string& bytes) {
  constexpr std::size_t kHeader = 4 + 6 * 4;
  if (bytes.size() < kHeader || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::ParseError, "not a dense map file (bad magic)");
  }
  if (get_u32(bytes, 4) != kMapsVersion) {
    throw Error(ErrorCode::ParseError,
                "unsupported dense map version " + std::to_string(get_u32(bytes, 4)));
  }
  const auto h = get_u32(bytes, 8);
  const auto w = get_u32(bytes, 12);
  const auto stride = get_u32(bytes, 16);
  const auto j = get_u32(bytes, 20);
  const auto l = get_u32(bytes, 24);
  if (h == 0 || w == 0 || stride == 0 || j < 1 || h > 1u << 16 || w > 1u << 16 ||
      j > 1024 || l > 4096) {
    throw Error(ErrorCode::ParseError, "implausible dense map header");
  }
  const std::uint64_t cells = static_cast<std::uint64_t>(h) * w;
  const std::uint64_t floats = cells * (j + 2ull * l + 3ull * (j - 1));
  if (bytes.size() != kHeader + 4 * floats) {
    throw Error(ErrorCode::ParseError, "dense map payload has " +
                                           std::to_string(bytes.size() - kHeader) +
                                           " bytes, header implies " +
                                           std::to_string(4 * floats));
  }
  DenseMaps maps(static_cast<int>(j), static_cast<int>(l), static_cast<int>(h),
                 static_cast<int>(w), static_cast<int>(stride));
  std::size_t at = kHeader;
  get_floats(bytes, at, maps.heatmap_data());
  get_floats(bytes, at, maps.paf_data());
  get_floats(bytes, at, maps.offset_data());
  return maps;
}

void write_maps(const std::filesystem::path& path, const DenseMaps& maps) {
  write_text_file(path, encode_maps(maps));
}

DenseMaps read_maps(const std::filesystem::path& path) {
  return decode_maps(read_file(path));
}

namespace {

std::string fmt(double v, int decimals) {
  if (!std::isfinite(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string csv_row(const std::string& id, const EvalRow& r) {
  return id + "," + fmt(r.pck_rel, 1) + "," + fmt(r.pck_abs, 1) + "," + fmt(r.pck_root, 1) +
         "," + fmt(r.pcod, 1) + "," + fmt(r.mrpe_x, 3) + "," + fmt(r.mrpe_y, 3) + "," +
         fmt(r.mrpe_z, 3) + "," + std::to_string(r.matched_count) + "," +
         std::to_string(r.gt_count) + "\n";
}

std::string text_cell(double v, int decimals, int width) {
  std::string s = std::isfinite(v) ? fmt(v, decimals) : "-";
  if (static_cast<int>(s.size()) < width) s.insert(0, width - s.size(), ' ');
  return s;
}

}  // namespace

std::string format_report_csv(const EvalReport& report) {
  std::string out =
      "frame_id,pck_rel,pck_abs,pck_root,pcod,mrpe_x,mrpe_y,mrpe_z,matched_count,gt_count\n";
  if (report.frames.empty()) return out;
  for (const EvalRow& r : report.frames) out += csv_row(std::to_string(r.frame_id), r);
  out += csv_row("all", report.summary);
  return out;
}

std::string format_report_text(const EvalReport& report) {
  std::string out = std::string("Regime: ") +
                    (report.include_unmatched ? "All people" : "Matched") + "\n";
  out += "   frame  PCK_rel  PCK_abs  PCK_root     PCOD    MRPE_x    MRPE_y    MRPE_z  matched/gt\n";
  auto line = [&](const std::string& id, const EvalRow& r) {
    std::string l = id;
    if (l.size() < 8) l.insert(0, 8 - l.size(), ' ');
    l += text_cell(r.pck_rel, 1, 9) + text_cell(r.pck_abs, 1, 9) + text_cell(r.pck_root, 1, 10) +
         text_cell(r.pcod, 1, 9) + text_cell(r.mrpe_x, 1, 10) + text_cell(r.mrpe_y, 1, 10) +
         text_cell(r.mrpe_z, 1, 10);
    std::string counts = std::to_string(r.matched_count) + "/" + std::to_string(r.gt_count);
    if (counts.size() < 12) counts.insert(0, 12 - counts.size(), ' ');
    out += l + counts + "\n";
  };
  for (const EvalRow& r : report.frames) line(std::to_string(r.frame_id), r);
  if (!report.frames.empty()) line("all", report.summary);
  return out;
}

void write_report(const EvalReport& report, const std::filesystem::path& path,
                  ReportFormat format) {
  write_text_file(path, format == ReportFormat::Csv ? format_report_csv(report)
                                                    : format_report_text(report));
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << contents;
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

}  // namespace geodepth::io
