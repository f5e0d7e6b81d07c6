#pragma once

// Generated by tests/oracles/compute_oracles.py (scipy collocation, adjoint Evans
// integration, Beta-function closed forms). Do not edit by hand.

namespace oracle {

inline constexpr double c0_star = 0.25;
inline constexpr double wb_star = 0.27670972411295874;
inline constexpr double U2_wb_star = 0.67264596460898474;
inline constexpr double Mf_star = 0.78539816339744817;
inline constexpr double Mb1_star = 0.26575530148841742;
inline constexpr double Mb2_leading_over_eps_star = 3.4505873874485458;
inline constexpr double wb_a04 = 0.12374380768954506;
inline constexpr double Mb1_a04 = 0.43625924505686181;
inline constexpr double c_eps002 = 0.2029890837328448;
inline constexpr double z_ae_eps002 = 5.5967290004221777;
inline constexpr double lambda1_eps002 = -0.14653381508017935;
inline constexpr double Mb2_full_eps002 = 0.069283996233073783;
inline constexpr double c_eps001 = 0.23045266016398475;
inline constexpr double z_ae_eps001 = 11.043756569820406;
inline constexpr double lambda1_eps001 = -0.080834330451770395;
inline constexpr double Mb2_full_eps001 = 0.052078171594909267;
inline constexpr double c_eps0005 = 0.24082842914647695;
inline constexpr double z_ae_eps0005 = 21.256311954794082;
inline constexpr double lambda1_eps0005 = -0.04389921771923018;
inline constexpr double Mb2_full_eps0005 = 0.025592294402174167;

}  // namespace oracle
