#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <pybind11/gil_safe_call_once.h>

#include <array>
#include <string>
#include <vector>

#include "geodepth/camera.hpp"
#include "geodepth/error.hpp"
#include "geodepth/geo_depth.hpp"
#include "geodepth/io.hpp"
#include "geodepth/pipeline.hpp"
#include "geodepth/synth.hpp"
#include "geodepth/uncertainty.hpp"

namespace py = pybind11;
using namespace geodepth;

namespace {

const SkeletonDef& skel() { return SkeletonDef::mupots15(); }

// (J, 3) array of (u, v, z_rel) rows; NaN rows are treated as missing joints.
Pose25D pose_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2 || a.shape(1) != 3) {
    throw Error(ErrorCode::InvalidConfig, "pose must have shape (J, 3)");
  }
  const auto n = static_cast<int>(a.shape(0));
  if (n != skel().joint_count()) {
    throw Error(ErrorCode::InvalidConfig,
                "pose must have " + std::to_string(skel().joint_count()) + " joints");
  }
  Pose25D pose = Pose25D::empty(n);
  auto r = a.unchecked<2>();
  for (int k = 0; k < n; ++k) {
    pose.joints[k] = {r(k, 0), r(k, 1), r(k, 2)};
    pose.valid[k] = r(k, 0) == r(k, 0) && r(k, 1) == r(k, 1) && r(k, 2) == r(k, 2);
  }
  return pose;
}

const char* branch_name(RootBranch b) {
  switch (b) {
    case RootBranch::TwoRoots: return "two_roots";
    case RootBranch::Tangent: return "tangent";
    case RootBranch::NoRealRoot: return "no_real_root";
  }
  return "";
}

std::vector<SceneSample> scenes_from_json(const std::vector<std::string>& docs) {
  std::vector<SceneSample> scenes;
  scenes.reserve(docs.size());
  for (const auto& d : docs) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(d);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, e.what());
    }
    scenes.push_back(io::scene_from_json(j));
  }
  return scenes;
}

py::dict row_dict(const EvalRow& r) {
  py::dict d;
  d["pck_rel"] = r.pck_rel;
  d["pck_abs"] = r.pck_abs;
  d["pck_root"] = r.pck_root;
  d["pcod"] = r.pcod;
  d["mrpe_x"] = r.mrpe_x;
  d["mrpe_y"] = r.mrpe_y;
  d["mrpe_z"] = r.mrpe_z;
  d["matched_count"] = r.matched_count;
  d["gt_count"] = r.gt_count;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Geometric root depth, uncertainty fusion and evaluation";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [&] { return py::object(py::exception<Error>(m, "GeodepthError", PyExc_RuntimeError)); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      // Instances carry the error code name, e.g. "TangentSingularity".
      const py::object& cls = error_type.get_stored();
      py::object exc = cls(e.what());
      exc.attr("code") = py::str(std::string(to_string(e.code())));
      PyErr_SetObject(cls.ptr(), exc.ptr());
    }
  });

  py::class_<CameraIntrinsics>(m, "Camera")
      .def(py::init([](double fx, double fy, double cx, double cy) {
             CameraIntrinsics c{fx, fy, cx, cy};
             c.validate();
             return c;
           }),
           py::arg("fx"), py::arg("fy"), py::arg("cx"), py::arg("cy"))
      .def_readonly("fx", &CameraIntrinsics::fx)
      .def_readonly("fy", &CameraIntrinsics::fy)
      .def_readonly("cx", &CameraIntrinsics::cx)
      .def_readonly("cy", &CameraIntrinsics::cy)
      .def("__repr__", [](const CameraIntrinsics& c) {
        return "Camera(fx=" + std::to_string(c.fx) + ", fy=" + std::to_string(c.fy) +
               ", cx=" + std::to_string(c.cx) + ", cy=" + std::to_string(c.cy) + ")";
      });

  m.def("project",
        [](std::array<double, 3> p, const CameraIntrinsics& cam) {
          const Pixel px = project({p[0], p[1], p[2]}, cam);
          return std::array<double, 2>{px.u, px.v};
        },
        py::arg("point"), py::arg("camera"));
  m.def("back_project",
        [](std::array<double, 3> p, double z_root, const CameraIntrinsics& cam) {
          const Point3D q = back_project({p[0], p[1], p[2]}, z_root, cam);
          return std::array<double, 3>{q.x, q.y, q.z};
        },
        py::arg("point"), py::arg("z_root"), py::arg("camera"),
        "Lifts (u, v, z_rel) to camera space at depth z_root + z_rel.");

  m.def("joint_names", [] { return skel().joint_names(); });
  m.def("root_index", [] { return skel().root_index(); });
  m.def("neck_index", [] { return skel().neck_index(); });

  m.def("quad_coeffs",
        [](const py::array_t<double>& pose, const CameraIntrinsics& cam, double omega) {
          const QuadCoeffs q = quad_coeffs(pose_from_array(pose), cam, TorsoPrior(omega), skel());
          return std::array<double, 3>{q.a, q.b, q.c};
        },
        py::arg("pose"), py::arg("camera"), py::arg("omega"));

  m.def("geo_depth",
        [](const py::array_t<double>& pose, const CameraIntrinsics& cam, double omega) {
          const GeoDepthResult r = geo_depth(pose_from_array(pose), cam, TorsoPrior(omega), skel());
          return py::make_tuple(r.z, branch_name(r.branch));
        },
        py::arg("pose"), py::arg("camera"), py::arg("omega"),
        "Root depth and branch name for a (J, 3) pose of (u, v, z_rel).");

  m.def("geo_depth_grad",
        [](const py::array_t<double>& pose, const CameraIntrinsics& cam, double omega,
           double tangent_eps) {
          const GeoGradient g =
              geo_depth_grad(pose_from_array(pose), cam, TorsoPrior(omega), skel(), tangent_eps);
          py::dict d;
          d["u_root"] = g.du_root;
          d["v_root"] = g.dv_root;
          d["u_neck"] = g.du_neck;
          d["v_neck"] = g.dv_neck;
          d["z_rel_neck"] = g.dz_neck;
          d["omega"] = g.domega;
          return d;
        },
        py::arg("pose"), py::arg("camera"), py::arg("omega"),
        py::arg("tangent_eps") = kDefaultTangentEps);

  m.def("geo_loss", &geo_loss, py::arg("z_geo"), py::arg("z_gt"), py::arg("sigma"));
  m.def("reg_loss",
        [](double z, double sigma, double z_gt) { return reg_loss({z, sigma}, z_gt); },
        py::arg("z"), py::arg("sigma"), py::arg("z_gt"));
  m.def("fuse",
        [](std::array<double, 2> reg, std::array<double, 2> geo) {
          const DepthEstimate f = fuse({reg[0], reg[1]}, {geo[0], geo[1]});
          return std::array<double, 2>{f.z, f.sigma};
        },
        py::arg("reg"), py::arg("geo"), "Inverse-sigma fusion of two (z, sigma) pairs.");

  m.def("derive_seed", &derive_seed, py::arg("base"), py::arg("stream"));

  m.def("generate_scene",
        [](int persons, std::uint64_t seed, bool non_overlapping, std::int64_t frame_id) {
          SceneConfig cfg;
          cfg.non_overlapping = non_overlapping;
          return io::canonical_dump(io::scene_to_json(generate_scene(persons, seed, cfg, frame_id)));
        },
        py::arg("persons"), py::arg("seed"), py::arg("non_overlapping") = true,
        py::arg("frame_id") = 0, "Synthetic scene as a JSON document.");

  m.def("fusion_benchmark",
        [](int samples, std::uint64_t seed, double reg_sigma_min, double reg_sigma_max) {
          FusionBenchConfig cfg;
          cfg.samples = samples;
          cfg.reg.rel_sigma_min = reg_sigma_min;
          cfg.reg.rel_sigma_max = reg_sigma_max;
          const auto s = summarize(fusion_benchmark(cfg, seed));
          py::dict d;
          d["reg"] = s.mean_abs_reg;
          d["geo"] = s.mean_abs_geo;
          d["fused"] = s.mean_abs_fused;
          d["count"] = s.count;
          return d;
        },
        py::arg("samples") = 10000, py::arg("seed") = 0, py::arg("reg_sigma_min") = 0.02,
        py::arg("reg_sigma_max") = 0.15, "Mean absolute depth error per estimator, in meters.");

  m.def("evaluate",
        [](const std::vector<std::string>& scenes, std::uint64_t seed, double pixel_sigma,
           double zrel_sigma, double omega_error, double reg_sigma_min, double reg_sigma_max,
           int workers) {
          const auto batch = scenes_from_json(scenes);
          NoiseModel noise{pixel_sigma, zrel_sigma, omega_error, 0.0};
          PipelineConfig cfg;
          cfg.reg.rel_sigma_min = reg_sigma_min;
          cfg.reg.rel_sigma_max = reg_sigma_max;
          EvalReport report;
          {
            py::gil_scoped_release release;
            report = end_to_end(batch, noise, cfg, seed, workers);
          }
          return row_dict(report.summary);
        },
        py::arg("scenes"), py::arg("seed") = 0, py::arg("pixel_sigma") = 0.0,
        py::arg("zrel_sigma") = 0.0, py::arg("omega_error") = 0.0,
        py::arg("reg_sigma_min") = 0.0, py::arg("reg_sigma_max") = 0.0, py::arg("workers") = 1,
        "Runs the full pipeline on JSON scenes and returns the summary metrics.");
}
