import init, { thin, sweepCsv, pairCertificate } from "./pkg/treeforge_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const big = (id) => BigInt($(id).value);

function guard(target, f) {
  try {
    target.classList.remove("bad");
    f();
  } catch (e) {
    target.classList.add("bad");
    target.textContent = String(e.message ?? e);
  }
}

function runThin() {
  guard($("thin-info"), () => {
    const out = JSON.parse(thin($("thin-x").value, big("thin-alpha"), num("thin-imax"), num("thin-depth")));
    $("thin-info").textContent =
      `${out.nodes} nodes; splits at levels ${out.ramification_levels.join(", ")}; ` +
      `enforced blocks ${out.enforced.join(", ")} start at ${out.enforced_levels.join(", ")}`;
    $("thin-svg").innerHTML = out.svg;
    $("thin-dot").textContent = out.dot;
  });
}

function runSweep() {
  guard($("sweep-out"), () => {
    $("sweep-out").textContent = sweepCsv(
      $("sweep-pred").value, $("sweep-x").value, $("sweep-y").value, big("sweep-from"), big("sweep-to"));
  });
}

function runCert() {
  guard($("cert-info"), () => {
    const out = JSON.parse(pairCertificate(
      $("cert-x").value, big("cert-alpha"), big("cert-beta"), num("cert-imax"), num("cert-depth")));
    const c = out.certificate;
    $("cert-info").textContent = out.passed
      ? `incompatible: no shared split at or above level ${c.divergence_level} (checked to ${c.checked_to})`
      : `${c.violations.length} shared splits at or above level ${c.divergence_level}`;
    $("cert-out").textContent = JSON.stringify(c, null, 2);
  });
}

await init();
$("thin-go").onclick = runThin;
$("sweep-go").onclick = runSweep;
$("cert-go").onclick = runCert;
runThin();
