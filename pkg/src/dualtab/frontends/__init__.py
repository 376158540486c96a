from .entailment import EntailmentProblem, encode_entailment
from .kripke import KripkeModel, eval_modal, kripke_countermodel
from .modal import (And, Box, Dia, ModalFormula, Not, Or, Prop, parse_modal,
                    render_modal, translate_modal)

__all__ = [
    "EntailmentProblem", "encode_entailment",
    "KripkeModel", "eval_modal", "kripke_countermodel",
    "ModalFormula", "Prop", "Not", "And", "Or", "Box", "Dia",
    "parse_modal", "render_modal", "translate_modal",
]
