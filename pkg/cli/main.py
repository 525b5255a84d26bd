"""
Module: main.py

Descripción:
    Punto de entrada de la CLI de rotlab:

        python -m cli.main <grupo> <comando> [opciones]

    Cada ejecución escribe un ReportBundle JSON en la carpeta de salida y añade un registro al
    rastro de auditoría (audit_log.parquet). Códigos de salida: 0 éxito, 2 hallazgos de
    auditoría, 1 error.
"""

import argparse
import logging
import os
import sys
import time

from geometry.base.errors import RotLabError
from cli.commands import COMMANDS
from utils.config.settings import load_run_config
from utils.file_management.folder_searcher import find_or_create_folder, output_path
from utils.reporting.metadata_logger import MetadataLogger, build_report_bundle, write_report_bundle

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FINDINGS = 2
AUDIT_LOG_NAME = "audit_log.parquet"


def _common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="RunConfig en JSON o YAML")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", help="carpeta de salida")
    parser.add_argument("--budget-n", type=int, dest="budget_n", help="pasos por trayectoria")
    parser.add_argument("--budget-seeds", type=int, dest="budget_seeds", help="número de semillas")
    parser.add_argument("--radius", type=int, help="radio de la bola de palabras")
    parser.add_argument("--genus", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rotlab", description="Conjuntos de rotación en superficies hiperbólicas")
    groups = parser.add_subparsers(dest="group", required=True)

    def command(group_parsers, name, help_text):
        sub = group_parsers.add_parser(name, help=help_text)
        _common(sub)
        return sub

    group = groups.add_parser("group").add_subparsers(dest="command", required=True)
    command(group, "build", "construye el grupo de superficie y comprueba la relación")

    geodesic = groups.add_parser("geodesic").add_subparsers(dest="command", required=True)
    sub = command(geodesic, "axis", "eje y longitud de traslación de una palabra")
    sub.add_argument("word")
    sub = command(geodesic, "cross", "cruce de los ejes de dos palabras")
    sub.add_argument("word")
    sub.add_argument("other")
    sub = command(geodesic, "selfx", "testigo de autointersección")
    sub.add_argument("word")

    covering = groups.add_parser("covering").add_subparsers(dest="command", required=True)
    sub = command(covering, "classify", "clasifica el cubrimiento <w1, w2>")
    sub.add_argument("word")
    sub.add_argument("other")
    sub.add_argument("--covering-radius", type=int, dest="covering_radius")

    rotset = groups.add_parser("rotset").add_subparsers(dest="command", required=True)
    command(rotset, "estimate", "estima el conjunto de rotación homotópico")
    command(rotset, "homology", "vectores de rotación homológicos")
    sub = command(rotset, "annulus", "número de rotación en el anillo de una dirección")
    sub.add_argument("word")
    sub = command(rotset, "star-audit", "auditoría de forma estrellada")
    sub.add_argument("--grid", type=int)
    sub = command(rotset, "power-audit", "auditoría de potencias e inversa")
    sub.add_argument("--power", type=int, default=2)
    sub.add_argument("--directions", nargs="*")

    periodic = groups.add_parser("periodic").add_subparsers(dest="command", required=True)
    sub = command(periodic, "search", "punto con f̃^q(z) = T^p z")
    sub.add_argument("word")
    sub.add_argument("--p", type=int, default=1)
    sub.add_argument("--q", type=int, default=1)
    sub.add_argument("--along", type=float, nargs=2, metavar=("A", "B"),
                     help="restringe la búsqueda a la geodésica de extremos angulares A, B")

    horseshoe = groups.add_parser("horseshoe").add_subparsers(dest="command", required=True)
    sub = command(horseshoe, "check", "¿es markoviana R1 ∩ R2?")
    sub.add_argument("rect1")
    sub.add_argument("rect2")
    sub = command(horseshoe, "audit", "auditoría de herradura rotacional")
    sub.add_argument("--rect", help="rectángulo en el disco (JSON); sin él se usa el modelo afín")
    sub.add_argument("--decks", nargs="*", default=[])

    plot = groups.add_parser("plot").add_subparsers(dest="command", required=True)
    sub = command(plot, "disk", "figura SVG del disco de Poincaré")
    sub.add_argument("--words", nargs="*")
    sub.add_argument("--orbits", action="store_true")
    sub.add_argument("--tiling-radius", type=int, default=2, dest="tiling_radius")
    sub.add_argument("--name", default="disk.svg")
    return parser


def _overrides(args) -> dict:
    return {
        "seed": args.seed,
        "out": args.out,
        "genus": args.genus,
        "budgets": {"n": args.budget_n, "seeds": args.budget_seeds, "radius": args.radius},
    }


def main(argv=None) -> int:
    logging.basicConfig(level=os.getenv("ROTLAB_LOG_LEVEL", "INFO").upper(),
                        format="%(asctime)s [%(levelname)s] %(message)s")
    args = build_parser().parse_args(argv)
    name = f"{args.group} {args.command}"
    started = time.perf_counter()
    conf = None
    audit = None
    try:
        conf = load_run_config(args.config, _overrides(args))
        logging.getLogger().setLevel(conf["log_level"])
        audit = MetadataLogger(os.path.join(find_or_create_folder(conf["out"]), AUDIT_LOG_NAME))
        results, status, figures = COMMANDS[(args.group, args.command)](args, conf)
        bundle = build_report_bundle(name, conf, results, figures, time.perf_counter() - started, status)
        path = write_report_bundle(bundle, output_path(conf["out"], name))
        audit.log({"command": name, "status": status, "report": path, "execution_id": bundle["execution_id"]})
        audit.save()
        if status == "findings":
            logger.warning("%s terminó con hallazgos; ver %s", name, path)
            return EXIT_FINDINGS
        logger.info("%s terminado en %.2f s", name, time.perf_counter() - started)
        return EXIT_OK
    except RotLabError as exc:
        pointer = exc.context.get("pointer")
        if pointer is not None:
            logger.error("%s falló en %s: %s", name, pointer, exc.message, exc_info=True)
        else:
            logger.error("%s falló: %s", name, exc.message, exc_info=True)
        if audit is not None:
            audit.log_error(exc.message, {"command": name, **exc.to_dict()})
            audit.save()
        return EXIT_ERROR
    except ValueError as exc:
        logger.error("%s falló: %s", name, exc, exc_info=True)
        if audit is not None:
            audit.log_error(str(exc), {"command": name})
            audit.save()
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
