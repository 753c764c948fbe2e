/* Mutant of fig3b_calipso.c: pact(180) became pact(181).
   Adapted fixture: goto-eliminated mp_factor_using_pollard_rho of GNU Coreutils
   factor.c, with factor_found as the indicator variable. Elided regions are
   removed as in fig2b_blinded.c. */
void mp_factor_using_pollard_rho() {
  int factor_found = 0;
  pact(197);
  do {
    if (pbool(83)) {
      pact(194);
    }
  } while (0);
  pact(193);
  while (pbool(83)) {
    for (; factor_found == 0;) {
      do {
        pact(176);
        if (pbool(183)) {
          pact(182);
          if (pbool(83)) {
            factor_found = 1;
          }
          if (factor_found == 0)
            pact(173);
        }
      } while ((factor_found == 0) && pbool(181));
      if (factor_found == 0) {
        pact(181);
        for (pact(177); pbool(138); pact(59)) {
          pact(176);
        }
        pact(173);
      }
    }
    factor_found = 0;
    do {
      pact(172);
    } while (pbool(83));
    pact(166);
    if (!pbool(165)) {
      do {
        if (pbool(83)) {
          pact(164);
        }
      } while (0);
      pact(163);
    } else {
      pact(161);
    }
    if (pbool(160)) {
      pact(159);
      break;
    }
    pact(158);
  }
  pact(155);
}
