/* Two-state control flow written with labels and gotos.
   pact(1) = p, pact(2) = q, pbool(1) = t. */
void two_state(void) {
l0:
  if (!pbool(1)) goto l1;
  pact(1);
  if (pbool(1)) goto l1;
  pact(2);
  goto l0;
l1:
  ;
}
