import os
import tempfile
import threading
from unittest import TestCase

import pytest

from manifest import RunManifest
from output import OutputWriter


class TestOutputWriter(TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.out_dir = os.path.join(self.directory.name, "run")
        self.manifest = RunManifest("c", "p", "equilibrium", 1)
        self.writer = OutputWriter(self.out_dir, self.manifest)

    def tearDown(self):
        self.directory.cleanup()

    def read(self, name):
        with open(os.path.join(self.out_dir, name)) as fh:
            return fh.read()

    def test_csv_cells(self):
        self.writer.write_csv("table.csv", ["time", "value", "steady"], [[0.0, None, True], [0.5, 1.25, False]])

        self.assertEqual(self.read("table.csv"), "time,value,steady\n0.0,,true\n0.5,1.25,false\n")
        self.assertEqual(self.manifest.files, ["table.csv"])

    def test_row_width_checked(self):
        with pytest.raises(AssertionError):
            self.writer.write_csv("table.csv", ["a", "b"], [[1]])

    def test_text_and_callback_writers(self):
        self.writer.write_text("notes.txt", "hello\n")
        self.writer.write_with("blob.bin", lambda path: open(path, "wb").close())

        self.assertEqual(self.read("notes.txt"), "hello\n")
        self.assertTrue(os.path.exists(os.path.join(self.out_dir, "blob.bin")))
        self.assertEqual(self.manifest.files, ["notes.txt", "blob.bin"])

    def test_manifest_not_listed(self):
        path = self.writer.write_manifest()

        self.assertTrue(os.path.exists(path))
        self.assertEqual(self.manifest.files, [])
        with pytest.raises(AssertionError):
            self.writer.write_text("manifest.json", "{}")

    def test_worker_threads_cannot_write(self):
        failures = []

        def write():
            try:
                self.writer.write_text("late.txt", "x")
            except AssertionError as e:
                failures.append(e)

        thread = threading.Thread(target=write)
        thread.start()
        thread.join()

        self.assertEqual(len(failures), 1)
        self.assertFalse(os.path.exists(os.path.join(self.out_dir, "late.txt")))
        self.assertEqual(self.manifest.files, [])
