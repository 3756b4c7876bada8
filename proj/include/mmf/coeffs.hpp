#pragma once

namespace mmf {

// Coefficient functions defined as quotients of integrals over the unit disc,
// reduced to one-dimensional angular integrals. lambda in [0, inf]; pass
// std::numeric_limits<double>::infinity() for the symbolic limit.
//   q1(0)=q2(0)=1, q1(inf)=q2(inf)=0 exact; q1(1)=1/4, q2(1)=3/4, q3(1)=1/2.
double q1(double lambda);
double q2(double lambda);
double q3(double lambda);

}  // namespace mmf
