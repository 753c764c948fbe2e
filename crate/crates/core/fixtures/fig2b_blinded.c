/* Adapted fixture: the blinded form of mp_factor_using_pollard_rho from
   GNU Coreutils factor.c. Elided regions are removed here and in every
   fixture this one is compared with. The step of the inner for loop is
   an action, pact(59). */
void mp_factor_using_pollard_rho() {
  pact(197);
  do {
    if (pbool(83)) {
      pact(194);
    }

  } while (0);
  pact(193);
  while (pbool(83)) {
    for (;;) {
      do {
        pact(176);
        if (pbool(183)) {
          pact(182);
          if (pbool(83)) {
            goto factor_found;
          }
          pact(173);
        }

      } while (pbool(181));
      pact(180);
      for (pact(177); pbool(138); pact(59)) {
        pact(176);
      }
      pact(173);
    }
  factor_found:
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
