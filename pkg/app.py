# app.py - Flask JSON API over the schwinger representations
from flask import Flask, request, jsonify
import traceback

from schwinger.config import load_settings
from schwinger.numtheory import (
    enumerate_bifactorizations,
    factorize,
    root_to_bifactorization,
    unit_square_roots,
)
from schwinger.representations import build_basis
from schwinger.verify import CHECK_IDS, FAIL, report_to_dict, root_products_report, run_suite

app = Flask(__name__)

# Configuration
app.config['SETTINGS'] = load_settings()


def parse_split(raw):
    """Parse 'M1,M2' from the query string; None when absent."""
    if not raw:
        return None
    try:
        parts = [int(v) for v in raw.split(',')]
    except ValueError:
        raise ValueError(f"Split must look like M1,M2, got '{raw}'.")
    if len(parts) != 2:
        raise ValueError("Split must name exactly two factors.")
    return parts


def parse_one_based():
    return request.args.get('zero_based', 'false').lower() not in ('1', 'true', 'yes')


def bad_request(exc):
    return jsonify({"error": str(exc)}), 400


def server_error(what):
    app.logger.error(f"{what} failed:\n{traceback.format_exc()}")
    return jsonify({"error": f"{what} failed"}), 500


@app.route('/')
def index():
    """List the available endpoints and check ids."""
    return jsonify({
        "endpoints": [
            "/api/factor/<M>",
            "/api/roots/<M>",
            "/api/splits/<M>",
            "/api/basis/<M>?type=<kind>&split=<M1,M2>",
            "/api/check/<M>?checks=<id,...>",
            "/api/products/<M>",
        ],
        "checks": list(CHECK_IDS),
    }), 200


# === API ENDPOINTS ===

@app.route('/api/factor/<int:M>')
def api_factor(M):
    try:
        f = factorize(M)
        return jsonify({
            "M": M,
            "constituents": [
                {"p": c.p, "n": c.n, "m": c.m, "L": c.L, "N": c.N} for c in f.constituents
            ],
        }), 200
    except ValueError as e:
        return bad_request(e)
    except Exception:
        return server_error("Factorization")


@app.route('/api/roots/<int:M>')
def api_roots(M):
    try:
        f = factorize(M)
        roots = []
        for r in unit_square_roots(M, f):
            split = None
            if r.is_sign_root:
                bi = root_to_bifactorization(r, f)
                split = [bi.M1, bi.M2]
            roots.append({
                "a": r.a,
                "residues": list(r.sign_pattern),
                "signs": list(r.signs),
                "sign_root": r.is_sign_root,
                "split": split,
            })
        return jsonify({"M": M, "moduli": list(f.moduli), "roots": roots}), 200
    except ValueError as e:
        return bad_request(e)
    except Exception:
        return server_error("Root enumeration")


@app.route('/api/splits/<int:M>')
def api_splits(M):
    try:
        splits = enumerate_bifactorizations(factorize(M))
        return jsonify({
            "M": M,
            "splits": [
                {"M1": bi.M1, "M2": bi.M2, "L1": bi.L1, "L2": bi.L2, "N1": bi.N1, "N2": bi.N2}
                for bi in splits
            ],
        }), 200
    except ValueError as e:
        return bad_request(e)
    except Exception:
        return server_error("Split enumeration")


@app.route('/api/basis/<int:M>')
def api_basis(M):
    try:
        kind = request.args.get('type')
        if not kind:
            raise ValueError("No basis type was provided.")
        basis = build_basis(M, kind, parse_split(request.args.get('split')))
        settings = app.config['SETTINGS']
        return jsonify(basis.to_dict(one_based=parse_one_based(), limit=settings.max_dense)), 200
    except ValueError as e:
        return bad_request(e)
    except Exception:
        return server_error("Basis construction")


@app.route('/api/check/<int:M>')
def api_check(M):
    try:
        raw = request.args.get('checks', '')
        selection = [c.strip() for c in raw.split(',') if c.strip()] or None
        results = run_suite(M, selection, settings=app.config['SETTINGS'])
        report = report_to_dict(M, results)
        if any(r.status == FAIL for r in results):
            app.logger.warning(f"Verification failed for M={M}: {report['summary']}")
        return jsonify(report), 200
    except ValueError as e:
        return bad_request(e)
    except Exception:
        return server_error("Verification")


@app.route('/api/products/<int:M>')
def api_products(M):
    try:
        return jsonify({"M": M, "products": root_products_report(M)}), 200
    except ValueError as e:
        return bad_request(e)
    except Exception:
        return server_error("Root products")


if __name__ == '__main__':
    app.run(debug=True, host="0.0.0.0", port=5000)
