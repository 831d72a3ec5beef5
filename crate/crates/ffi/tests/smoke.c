#include <math.h>
#include <stdio.h>
#include "gasurf.h"

int main(void) {
  GasSurface *s = NULL;
  if (gas_surface_new("cylinder(rho=1)", &s) != GAS_STATUS_OK) return 1;

  GasPartition *p = NULL;
  if (gas_partition_rect(0.0, 0.0, M_PI / 2.0, 1.0, 5, &p) != GAS_STATUS_OK) return 2;
  double area = 0.0;
  if (gas_area_balanced(s, p, 0.0, &area) != GAS_STATUS_OK) return 3;
  if (fabs(area - M_PI / 2.0) > 1e-3) return 4;

  GasSurface *bad = NULL;
  if (gas_surface_new("cylinder(rho=-1)", &bad) != GAS_STATUS_INVALID_ARGUMENT) return 5;
  if (bad != NULL || gas_last_error() == NULL) return 6;

  printf("%.17g\n", area);
  gas_partition_free(p);
  gas_surface_free(s);
  return 0;
}
