"""Line-delimited JSON log of solver queries (--dump-queries)."""

import json
import threading


class QueryDump:
    def __init__(self, path: str):
        self.path = path
        self._fh = open(path, 'w', encoding='utf-8')
        self._lock = threading.Lock()
        self.count = 0

    def write(self, query, result) -> None:
        record = {
            'n': self.count,
            'constants': query.nconst,
            'literals': [str(lit) for lit in query.literals],
            'worlds': [str(world) for world in query.worlds],
            'result': 'sat' if result.is_sat else 'unsat',
        }
        if result.is_sat:
            model = result.model
            record['universe'] = model.universe
            record['procs'] = dict(model.procs)
            record['values'] = {str(term): value for term, value in model.values}
        with self._lock:
            self._fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + '\n')
            self.count += 1

    def close(self) -> None:
        with self._lock:
            self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False
