const fs = require('fs');

function fileSize(name) {
  const st = fs.lstatSync(name);
  return st.size;
}

function isDirectory(name) {
  return fs.statSync(name).isDirectory();
}

function modified(name) {
  return fs.statSync(name).mtime.getTime();
}

module.exports = { fileSize, isDirectory, modified };
